//! Random tasks and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stripstream::args;
use stripstream::model::{
    from_iter, Arg, Atom, AxiomSchema, Literal, ObjectRef, OperatorSchema, Payload, PredicateId,
    PredicateKind, StreamSchema,
};
use stripstream::IntProblem;

pub type StateSet = BTreeSet<Atom>;

fn var(i: usize) -> Arg {
    Arg::from(["X", "Y", "Z"][i])
}

/// Random STRIPS task with derived predicates and no streams.
///
/// Unary static `S`, unary fluents `F` and `G`, binary fluent `R` (only ever
/// deleted), unary derived `D` and nullary derived `Done`. Small enough for
/// exhaustive search.
pub fn random_task(seed: u64) -> IntProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = IntProblem::new(&format!("random-{seed}"));
    let s = p.declare("S", 1, PredicateKind::Static).unwrap();
    let f = p.declare("F", 1, PredicateKind::Fluent).unwrap();
    let g = p.declare("G", 1, PredicateKind::Fluent).unwrap();
    let r = p.declare("R", 2, PredicateKind::Fluent).unwrap();
    let d = p.declare("D", 1, PredicateKind::Derived).unwrap();
    let done = p.declare("Done", 0, PredicateKind::Derived).unwrap();
    let n = rng.gen_range(2..=4);
    let objs: Vec<ObjectRef> = (0..n).map(|i| p.object(Payload::symbol(&format!("o{i}")))).collect();
    for &o in &objs {
        if rng.gen_bool(0.6) {
            p.init_atom(s, [o]);
        }
        if rng.gen_bool(0.3) {
            p.init_atom(f, [o]);
        }
        if rng.gen_bool(0.2) {
            p.init_atom(g, [o]);
        }
    }
    if rng.gen_bool(0.5) {
        p.init_atom(r, [objs[0], objs[n - 1]]);
    }
    let unary = [f, g];
    for k in 0..rng.gen_range(2..=4) {
        let arity = rng.gen_range(1..=2);
        let params: Vec<&str> = ["X", "Y"][..arity].to_vec();
        let mut b = OperatorSchema::build(&format!("op{k}"), &params);
        if rng.gen_bool(0.5) {
            b = b.stat(s, args![var(0)]);
        }
        if arity == 2 && rng.gen_bool(0.5) {
            b = b.pre(r, args![var(0), var(1)]);
        }
        for v in 0..arity {
            let q = *unary.choose(&mut rng).unwrap();
            match rng.gen_range(0..4) {
                0 => b = b.pre(q, args![var(v)]),
                1 => b = b.pre_not(q, args![var(v)]),
                2 => b = b.pre(d, args![var(v)]),
                _ => {}
            }
        }
        if rng.gen_bool(0.2) {
            b = b.pre_not(s, args![var(arity - 1)]);
        }
        let mut any = false;
        for v in 0..arity {
            let q = *unary.choose(&mut rng).unwrap();
            if rng.gen_bool(0.7) {
                b = b.add(q, args![var(v)]);
                any = true;
            }
            if rng.gen_bool(0.4) {
                let q2 = *unary.choose(&mut rng).unwrap();
                b = b.del(q2, args![var(v)]);
            }
        }
        if arity == 2 && rng.gen_bool(0.3) {
            b = b.del(r, args![var(0), var(1)]);
        }
        if !any {
            b = b.add(g, args![var(0)]);
        }
        p.operators.push(b.cost(rng.gen_range(0..=3)).finish().unwrap());
    }
    p.axioms.push(
        AxiomSchema::build("d-from-f", &["X"])
            .pre(f, args!["X"])
            .pre_not(g, args!["X"])
            .head(d, args!["X"])
            .finish()
            .unwrap(),
    );
    p.axioms.push(
        AxiomSchema::build("d-from-r", &["X", "Y"])
            .pre(r, args!["X", "Y"])
            .pre(d, args!["Y"])
            .head(d, args!["X"])
            .finish()
            .unwrap(),
    );
    let target = *objs.choose(&mut rng).unwrap();
    p.axioms.push(
        AxiomSchema::build("done", &[])
            .pre(d, args![target])
            .pre(g, args![target])
            .head(done, args![])
            .finish()
            .unwrap(),
    );
    match rng.gen_range(0..3) {
        0 => p.goal_atom(done, []),
        1 => {
            p.goal_atom(g, [objs[0]]);
            p.goal_atom(d, [objs[n - 1]]);
        }
        _ => {
            p.goal_atom(f, [target]);
            p.goal_not(g, [target]);
        }
    }
    p
}

fn bindings(n_params: usize, objects: &[ObjectRef]) -> Vec<Vec<ObjectRef>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n_params {
        out = out
            .into_iter()
            .flat_map(|b| {
                objects.iter().map(move |&o| {
                    let mut b = b.clone();
                    b.push(o);
                    b
                })
            })
            .collect();
    }
    out
}

/// Closes a state under the axioms by naive iteration over all bindings.
pub fn derive(p: &IntProblem, base: &StateSet) -> StateSet {
    let mut truth = base.clone();
    loop {
        let mut changed = false;
        for ax in &p.axioms {
            for b in bindings(ax.params.len(), &p.objects) {
                let ok = ax.stat.iter().all(|a| truth.contains(&a.ground(&b)))
                    && ax.pre.iter().all(|l| truth.contains(&l.atom.ground(&b)) == l.positive);
                if ok && truth.insert(ax.head.ground(&b)) {
                    changed = true;
                }
            }
        }
        if !changed {
            return truth;
        }
    }
}

pub fn holds(goal: &[Literal], truth: &StateSet) -> bool {
    goal.iter().all(|l| truth.contains(&l.atom) == l.positive)
}

/// Every applicable ground operator instance as (operator, args, cost, successor).
pub fn successors(p: &IntProblem, state: &StateSet) -> Vec<(usize, Vec<ObjectRef>, u64, StateSet)> {
    let truth = derive(p, state);
    let mut out = Vec::new();
    for (oi, op) in p.operators.iter().enumerate() {
        for b in bindings(op.params.len(), &p.objects) {
            let ok = op.stat.iter().all(|a| truth.contains(&a.ground(&b)))
                && op.pre.iter().all(|l| truth.contains(&l.atom.ground(&b)) == l.positive);
            if !ok {
                continue;
            }
            let mut next = state.clone();
            for l in op.eff.iter().filter(|l| !l.positive) {
                next.remove(&l.atom.ground(&b));
            }
            for l in op.eff.iter().filter(|l| l.positive) {
                next.insert(l.atom.ground(&b));
            }
            out.push((oi, b, op.cost, next));
        }
    }
    out
}

pub fn ground_instances(p: &IntProblem) -> usize {
    p.operators.iter().map(|op| p.objects.len().pow(op.params.len() as u32)).sum()
}

pub fn initial_state(p: &IntProblem) -> StateSet {
    p.init.iter().cloned().collect()
}

/// Uniform-cost search over the lifted task. Returns the optimal cost from
/// `start`, `None` when the goal is unreachable, and also every state settled.
pub fn dijkstra(p: &IntProblem, start: &StateSet) -> (Option<u64>, Vec<(StateSet, u64)>) {
    let mut dist: HashMap<StateSet, u64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut settled = Vec::new();
    let mut closed = BTreeSet::new();
    dist.insert(start.clone(), 0);
    heap.push(Reverse((0u64, start.clone())));
    while let Some(Reverse((g, s))) = heap.pop() {
        if !closed.insert(s.clone()) {
            continue;
        }
        settled.push((s.clone(), g));
        if holds(&p.goal, &derive(p, &s)) {
            return (Some(g), settled);
        }
        for (_, _, c, next) in successors(p, &s) {
            let ng = g + c;
            if dist.get(&next).is_none_or(|&d| ng < d) {
                dist.insert(next.clone(), ng);
                heap.push(Reverse((ng, next)));
            }
        }
    }
    (None, settled)
}

/// Cost of a plan given as (operator, args) steps, or `None` if it is not valid.
pub fn replay(p: &IntProblem, steps: &[(usize, Vec<ObjectRef>)]) -> Option<u64> {
    let mut s = initial_state(p);
    let mut cost = 0;
    for (oi, args) in steps {
        let (_, _, c, next) = successors(p, &s).into_iter().find(|(o, b, _, _)| o == oi && b == args)?;
        cost += c;
        s = next;
    }
    holds(&p.goal, &derive(p, &s)).then_some(cost)
}

/// A hidden directed graph on `0..nodes` revealed by a finite stream.
pub struct HiddenGraph {
    pub nodes: i64,
    pub edges: Vec<(i64, i64)>,
    pub start: i64,
    pub target: i64,
}

impl HiddenGraph {
    pub fn random(seed: u64, nodes: i64, feasible: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (start, target) = (0, nodes - 1);
        let mut edges = Vec::new();
        if feasible {
            let mut path: Vec<i64> = (1..nodes - 1).filter(|_| rng.gen_bool(0.5)).collect();
            path.shuffle(&mut rng);
            let mut prev = start;
            for &x in path.iter().chain([&target]) {
                edges.push((prev, x));
                prev = x;
            }
        }
        for _ in 0..rng.gen_range(0..2 * nodes) {
            let a = rng.gen_range(0..nodes);
            let b = rng.gen_range(0..nodes - 1);
            if feasible || b != target {
                edges.push((a, b));
            }
        }
        if !feasible {
            edges.retain(|&(_, b)| b != target);
        }
        edges.sort_unstable();
        edges.dedup();
        HiddenGraph { nodes, edges, start, target }
    }

    pub fn reachable(&self) -> bool {
        let mut seen = vec![false; self.nodes as usize];
        let mut stack = vec![self.start];
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x as usize], true) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|e| e.0 == x).map(|e| e.1));
        }
        seen[self.target as usize]
    }

    /// `Move` along certified edges; `Succ` lists the out-neighbours of a
    /// node and `Link` tests a candidate edge between known nodes.
    pub fn problem(&self) -> IntProblem {
        let mut p = IntProblem::new("hidden-graph");
        let node = p.declare("Node", 1, PredicateKind::Static).unwrap();
        let edge = p.declare("Edge", 2, PredicateKind::Static).unwrap();
        let at = p.declare("At", 1, PredicateKind::Fluent).unwrap();
        let s = p.object(Payload::Int(self.start));
        let t = p.object(Payload::Int(self.target));
        p.init_atom(node, [s]);
        p.init_atom(at, [s]);
        p.goal_atom(at, [t]);
        p.operators.push(
            OperatorSchema::build("Move", &["X", "Y"])
                .stat(edge, args!["X", "Y"])
                .pre(at, args!["X"])
                .add(at, args!["Y"])
                .del(at, args!["X"])
                .finish()
                .unwrap(),
        );
        let edges = self.edges.clone();
        let succ_edges = edges.clone();
        p.streams.push(
            StreamSchema::build("Succ", &["X"], &["Y"])
                .inp(node, args!["X"])
                .out(node, args!["Y"])
                .out(edge, args!["X", "Y"])
                .generator(move |x| {
                    let a = x[0].as_int().unwrap();
                    let out: Vec<Vec<Payload>> = succ_edges
                        .iter()
                        .filter(|e| e.0 == a)
                        .map(|e| vec![Payload::Int(e.1)])
                        .collect();
                    from_iter(out)
                })
                .finish()
                .unwrap(),
        );
        p.streams.push(
            StreamSchema::build("Link", &["X", "Y"], &[])
                .inp(node, args!["X"])
                .inp(node, args!["Y"])
                .out(edge, args!["X", "Y"])
                .test(move |x| {
                    let (a, b) = (x[0].as_int().unwrap(), x[1].as_int().unwrap());
                    edges.contains(&(a, b))
                })
                .eager(false)
                .finish()
                .unwrap(),
        );
        p
    }
}

/// `j` unconditional infinite streams whose outputs enable nothing, and an
/// unreachable goal.
pub fn live_streams(j: usize) -> IntProblem {
    let mut p = IntProblem::new("live");
    let val = p.declare("Val", 2, PredicateKind::Static).unwrap();
    let flag = p.declare("Flag", 0, PredicateKind::Fluent).unwrap();
    p.goal_atom(flag, []);
    for k in 0..j {
        let tag = p.object(Payload::Int(k as i64));
        p.streams.push(
            StreamSchema::build(&format!("Gen{k}"), &[], &["Y"])
                .out(val, args![tag, "Y"])
                .generator(move |_| from_iter((0..).map(move |i| vec![Payload::tagged("v", [Payload::Int(k as i64), Payload::Int(i)])])))
                .finish()
                .unwrap(),
        );
    }
    p
}

pub fn predicate(p: &IntProblem, name: &str) -> PredicateId {
    p.predicates.lookup(name).unwrap()
}
