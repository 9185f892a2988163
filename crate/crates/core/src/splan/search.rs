use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::axioms::AxiomEvaluator;
use super::ground::{GroundTask, State};
use super::heuristic::{Heuristic, HeuristicKind, Key};
use crate::Cost;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Strategy {
    AStar,
    Gbfs,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub heuristic: HeuristicKind,
    /// When false every action costs one, both for `g` and for the heuristic.
    pub cost_sensitive: bool,
    pub max_expansions: Option<u64>,
    pub deadline: Option<Instant>,
    /// Post-process plans with [`eliminate_redundant`] and [`shortcut`].
    pub eliminate_redundant: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Gbfs,
            heuristic: HeuristicKind::HFf,
            cost_sensitive: true,
            max_expansions: None,
            deadline: None,
            eliminate_redundant: true,
        }
    }
}

impl SearchConfig {
    /// A* with the admissible max heuristic: returns cost-optimal plans.
    pub fn optimal() -> Self {
        SearchConfig {
            strategy: Strategy::AStar,
            heuristic: HeuristicKind::HMax,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Indices into `task.actions`.
    Plan(Vec<usize>),
    Infeasible,
    Timeout,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub evaluated: u64,
}

struct Node<C> {
    parent: u32,
    action: u32,
    g: C,
    h: Option<C>,
    closed: bool,
}

type OpenKey<C> = Reverse<(Key<C>, Key<C>, u64, u32)>;

const ROOT: u32 = u32::MAX;

/// Best-first search over the grounded task.
///
/// Ties on `f` are broken by lower `h`, then by insertion order. A* reopens
/// closed nodes when a cheaper path is found.
pub fn search<C: Cost>(task: &GroundTask<C>, config: &SearchConfig) -> (SearchOutcome, SearchStats) {
    let (outcome, stats) = best_first(task, config);
    match outcome {
        SearchOutcome::Plan(p) if config.eliminate_redundant => {
            let p = shortcut(task, &eliminate_redundant(task, &p));
            (SearchOutcome::Plan(eliminate_redundant(task, &p)), stats)
        }
        other => (other, stats),
    }
}

fn best_first<C: Cost>(task: &GroundTask<C>, config: &SearchConfig) -> (SearchOutcome, SearchStats) {
    let mut stats = SearchStats::default();
    if task.goal_unreachable() {
        return (SearchOutcome::Infeasible, stats);
    }
    if config.strategy == Strategy::Gbfs {
        return lazy_gbfs(task, config);
    }
    let astar = config.strategy == Strategy::AStar;
    let unit = !config.cost_sensitive;
    let mut h = Heuristic::new(task, config.heuristic, config.cost_sensitive);
    let mut axioms = AxiomEvaluator::new();
    let mut truth = Vec::new();

    let mut by_first: Vec<Vec<u32>> = vec![Vec::new(); task.num_facts()];
    let mut unconditioned = Vec::new();
    for (i, a) in task.actions.iter().enumerate() {
        match a.pre_pos.first() {
            Some(&f) => by_first[f as usize].push(i as u32),
            None => unconditioned.push(i as u32),
        }
    }

    let mut states: Vec<State> = Vec::new();
    let mut nodes: Vec<Node<C>> = Vec::new();
    let mut ids: FxHashMap<State, u32> = FxHashMap::default();
    let mut open: BinaryHeap<OpenKey<C>> = BinaryHeap::new();
    let mut counter = 0u64;

    let init = task.init().clone();
    stats.evaluated += 1;
    let h0 = match h.evaluate(&init) {
        Some(v) => v,
        None => return (SearchOutcome::Infeasible, stats),
    };
    ids.insert(init.clone(), 0);
    states.push(init);
    nodes.push(Node {
        parent: ROOT,
        action: 0,
        g: C::zero(),
        h: Some(h0),
        closed: false,
    });
    let priority = |g: C, hv: C| if astar { g + hv } else { hv };
    open.push(Reverse((Key(priority(C::zero(), h0)), Key(h0), counter, 0)));

    let mut applicable: Vec<u32> = Vec::new();
    while let Some(Reverse((Key(f), _, _, id))) = open.pop() {
        let node = &nodes[id as usize];
        if node.closed {
            continue;
        }
        // Stale entry left behind after a cheaper path was found.
        if astar && f.total_cmp(&priority(node.g, node.h.expect("open nodes are finite"))) != Ordering::Equal {
            continue;
        }
        nodes[id as usize].closed = true;
        if stats.expanded % 256 == 0 {
            if let Some(d) = config.deadline {
                if Instant::now() >= d {
                    return (SearchOutcome::Timeout, stats);
                }
            }
        }
        if let Some(max) = config.max_expansions {
            if stats.expanded >= max {
                return (SearchOutcome::Timeout, stats);
            }
        }
        stats.expanded += 1;
        let state = states[id as usize].clone();
        axioms.truth(task, &state, &mut truth);
        if task.is_goal(&truth) {
            return (SearchOutcome::Plan(extract(&nodes, id)), stats);
        }
        applicable.clear();
        applicable.extend_from_slice(&unconditioned);
        for (f, &t) in truth.iter().enumerate() {
            if t {
                applicable.extend_from_slice(&by_first[f]);
            }
        }
        applicable.sort_unstable();
        let g = nodes[id as usize].g;
        for &ai in &applicable {
            let a = &task.actions[ai as usize];
            if !task.applicable(a, &truth) {
                continue;
            }
            stats.generated += 1;
            let next = task.successor(&state, a);
            let g2 = g + if unit { C::one() } else { a.cost };
            match ids.get(&next) {
                Some(&nid) => {
                    let n = &mut nodes[nid as usize];
                    if !astar || g2.total_cmp(&n.g) != Ordering::Less {
                        continue;
                    }
                    let Some(hv) = n.h else { continue };
                    n.g = g2;
                    n.parent = id;
                    n.action = ai;
                    n.closed = false;
                    counter += 1;
                    open.push(Reverse((Key(priority(g2, hv)), Key(hv), counter, nid)));
                }
                None => {
                    stats.evaluated += 1;
                    let hv = h.evaluate(&next);
                    let nid = nodes.len() as u32;
                    ids.insert(next.clone(), nid);
                    states.push(next);
                    nodes.push(Node {
                        parent: id,
                        action: ai,
                        g: g2,
                        h: hv,
                        closed: hv.is_none(),
                    });
                    if let Some(hv) = hv {
                        counter += 1;
                        open.push(Reverse((Key(priority(g2, hv)), Key(hv), counter, nid)));
                    }
                }
            }
        }
    }
    (SearchOutcome::Infeasible, stats)
}

struct Successors {
    by_first: Vec<Vec<u32>>,
    unconditioned: Vec<u32>,
}

impl Successors {
    fn new<C: Cost>(task: &GroundTask<C>) -> Self {
        let mut by_first: Vec<Vec<u32>> = vec![Vec::new(); task.num_facts()];
        let mut unconditioned = Vec::new();
        for (i, a) in task.actions.iter().enumerate() {
            match a.pre_pos.first() {
                Some(&f) => by_first[f as usize].push(i as u32),
                None => unconditioned.push(i as u32),
            }
        }
        Successors { by_first, unconditioned }
    }

    fn collect<C: Cost>(&self, task: &GroundTask<C>, truth: &[bool], out: &mut Vec<u32>) {
        out.clear();
        out.extend_from_slice(&self.unconditioned);
        for (f, &t) in truth.iter().enumerate() {
            if t {
                out.extend_from_slice(&self.by_first[f]);
            }
        }
        out.sort_unstable();
        out.retain(|&ai| task.applicable(&task.actions[ai as usize], truth));
    }
}

type LazyKey<C> = Reverse<(Key<C>, u64, u32, u32)>;

const BOOST: i64 = 1000;

/// Greedy best-first search with deferred evaluation.
///
/// Successors are queued with their parent's estimate and evaluated only when
/// popped. With `HFf`, successors reached by helpful actions also enter a
/// second queue that is preferred whenever the estimate improves.
fn lazy_gbfs<C: Cost>(task: &GroundTask<C>, config: &SearchConfig) -> (SearchOutcome, SearchStats) {
    let mut stats = SearchStats::default();
    let mut h = Heuristic::new(task, config.heuristic, config.cost_sensitive);
    let mut axioms = AxiomEvaluator::new();
    let mut truth = Vec::new();
    let succ = Successors::new(task);

    let mut states: Vec<State> = Vec::new();
    let mut nodes: Vec<Node<C>> = Vec::new();
    let mut ids: FxHashMap<State, u32> = FxHashMap::default();
    let mut queues: [BinaryHeap<LazyKey<C>>; 2] = [BinaryHeap::new(), BinaryHeap::new()];
    let mut priority = [0i64; 2];
    let mut counter = 0u64;
    let mut best: Option<C> = None;
    let mut applicable = Vec::new();
    let mut helpful = Vec::new();

    // The root is an entry without an action.
    queues[0].push(Reverse((Key(C::zero()), 0, ROOT, ROOT)));
    loop {
        let q = match (queues[0].is_empty(), queues[1].is_empty()) {
            (true, true) => break,
            (false, true) => 0,
            (true, false) => 1,
            (false, false) => usize::from(priority[1] < priority[0]),
        };
        let Reverse((_, _, parent, action)) = queues[q].pop().expect("queue is non-empty");
        priority[q] += 1;
        let (state, g) = if parent == ROOT {
            (task.init().clone(), C::zero())
        } else {
            let a = &task.actions[action as usize];
            let pg = nodes[parent as usize].g;
            let step = if config.cost_sensitive { a.cost } else { C::one() };
            (task.successor(&states[parent as usize], a), pg + step)
        };
        if ids.contains_key(&state) {
            continue;
        }
        if stats.expanded % 256 == 0 {
            if let Some(d) = config.deadline {
                if Instant::now() >= d {
                    return (SearchOutcome::Timeout, stats);
                }
            }
        }
        if let Some(max) = config.max_expansions {
            if stats.expanded >= max {
                return (SearchOutcome::Timeout, stats);
            }
        }
        let id = nodes.len() as u32;
        ids.insert(state.clone(), id);
        nodes.push(Node {
            parent,
            action,
            g,
            h: None,
            closed: true,
        });
        states.push(state);
        let state = &states[id as usize];
        axioms.truth(task, state, &mut truth);
        if task.is_goal(&truth) {
            return (SearchOutcome::Plan(extract(&nodes, id)), stats);
        }
        stats.evaluated += 1;
        let Some(hv) = h.evaluate(state) else { continue };
        nodes[id as usize].h = Some(hv);
        stats.expanded += 1;
        if best.is_none_or(|b| hv.total_cmp(&b) == Ordering::Less) {
            best = Some(hv);
            priority[1] -= BOOST;
        }
        h.helpful_actions(&mut helpful);
        succ.collect(task, &truth, &mut applicable);
        for &ai in &applicable {
            stats.generated += 1;
            counter += 1;
            queues[0].push(Reverse((Key(hv), counter, id, ai)));
            if helpful.binary_search(&ai).is_ok() {
                queues[1].push(Reverse((Key(hv), counter, id, ai)));
            }
        }
    }
    (SearchOutcome::Infeasible, stats)
}

/// Greedy action elimination: repeatedly removes the first step whose
/// removal leaves a plan that is still applicable and reaches the goal.
pub fn eliminate_redundant<C: Cost>(task: &GroundTask<C>, plan: &[usize]) -> Vec<usize> {
    let mut plan = plan.to_vec();
    let mut axioms = AxiomEvaluator::new();
    let mut truth = Vec::new();
    let mut valid = |steps: &mut dyn Iterator<Item = usize>| {
        let mut state = task.init().clone();
        for ai in steps {
            let a = &task.actions[ai];
            axioms.truth(task, &state, &mut truth);
            if !task.applicable(a, &truth) {
                return false;
            }
            state = task.successor(&state, a);
        }
        axioms.truth(task, &state, &mut truth);
        task.is_goal(&truth)
    };
    let mut i = 0;
    while i < plan.len() {
        let rest = plan.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &a)| a);
        if valid(&mut rest.into_iter()) {
            plan.remove(i);
        } else {
            i += 1;
        }
    }
    plan
}

/// Replaces segments of the plan by a single action reaching the same state,
/// when that action costs no more than the segment. Revisited states are cut
/// out as well.
pub fn shortcut<C: Cost>(task: &GroundTask<C>, plan: &[usize]) -> Vec<usize> {
    let mut plan = plan.to_vec();
    let succ = Successors::new(task);
    let mut axioms = AxiomEvaluator::new();
    let mut truth = Vec::new();
    let mut applicable = Vec::new();
    let mut i = 0;
    while i < plan.len() {
        let mut states = vec![task.init().clone()];
        for &ai in &plan {
            let next = task.successor(states.last().unwrap(), &task.actions[ai]);
            states.push(next);
        }
        let mut last: FxHashMap<&State, usize> = FxHashMap::default();
        for (k, s) in states.iter().enumerate() {
            last.insert(s, k);
        }
        let j = last[&states[i]];
        if j > i {
            plan.drain(i..j);
            continue;
        }
        axioms.truth(task, &states[i], &mut truth);
        succ.collect(task, &truth, &mut applicable);
        let mut best: Option<(usize, u32)> = None;
        for &ai in &applicable {
            let a = &task.actions[ai as usize];
            let next = task.successor(&states[i], a);
            if let Some(&j) = last.get(&next) {
                if j > i + 1 && best.is_none_or(|(b, _)| j > b) {
                    let seg = plan[i..j].iter().fold(C::zero(), |c, &k| c + task.actions[k].cost);
                    if a.cost.total_cmp(&seg) != Ordering::Greater {
                        best = Some((j, ai));
                    }
                }
            }
        }
        if let Some((j, ai)) = best {
            plan.splice(i..j, [ai as usize]);
        }
        i += 1;
    }
    plan
}

fn extract<C>(nodes: &[Node<C>], mut id: u32) -> Vec<usize> {
    let mut plan = Vec::new();
    while nodes[id as usize].parent != ROOT {
        plan.push(nodes[id as usize].action as usize);
        id = nodes[id as usize].parent;
    }
    plan.reverse();
    plan
}
