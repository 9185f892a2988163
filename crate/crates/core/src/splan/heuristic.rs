use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::ground::{FactId, GroundTask, State};
use crate::Cost;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum HeuristicKind {
    /// Sum of relaxed achievement costs.
    HAdd,
    /// Max of relaxed achievement costs. Admissible.
    HMax,
    /// Cost of a relaxed plan extracted from the additive best supporters.
    HFf,
    /// Zero everywhere.
    Blind,
}

/// Total-order wrapper so costs can live in a binary heap.
#[derive(Copy, Clone, Debug)]
pub(crate) struct Key<C>(pub C);

impl<C: Cost> PartialEq for Key<C> {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl<C: Cost> Eq for Key<C> {}
impl<C: Cost> PartialOrd for Key<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C: Cost> Ord for Key<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct RelaxedOp<C> {
    pre: Vec<FactId>,
    add: Vec<FactId>,
    cost: C,
}

const NONE: u32 = u32::MAX;

/// Delete-relaxation heuristics computed by a generalized Dijkstra over facts.
///
/// Axioms are zero-cost relaxed operators and negative preconditions are
/// ignored. `None` stands for an infinite estimate.
pub struct Heuristic<'t, C> {
    task: &'t GroundTask<C>,
    kind: HeuristicKind,
    ops: Vec<RelaxedOp<C>>,
    watchers: Vec<Vec<u32>>,
    no_pre: Vec<u32>,
    n_actions: usize,
    cost: Vec<Option<C>>,
    done: Vec<bool>,
    counters: Vec<u32>,
    acc: Vec<C>,
    best: Vec<u32>,
    heap: BinaryHeap<Reverse<(Key<C>, FactId)>>,
    marked: Vec<bool>,
    stack: Vec<FactId>,
}

impl<'t, C: Cost> Heuristic<'t, C> {
    pub fn new(task: &'t GroundTask<C>, kind: HeuristicKind, cost_sensitive: bool) -> Self {
        let mut ops: Vec<RelaxedOp<C>> = task
            .actions
            .iter()
            .map(|a| RelaxedOp {
                pre: a.pre_pos.clone(),
                add: a.add.clone(),
                cost: if cost_sensitive { a.cost } else { C::one() },
            })
            .collect();
        let n_actions = ops.len();
        ops.extend(task.axioms.iter().map(|x| RelaxedOp {
            pre: x.body_pos.clone(),
            add: vec![x.head],
            cost: C::zero(),
        }));
        let n = task.num_facts();
        let mut watchers = vec![Vec::new(); n];
        let mut no_pre = Vec::new();
        for (i, op) in ops.iter().enumerate() {
            if op.pre.is_empty() {
                no_pre.push(i as u32);
            }
            for &f in &op.pre {
                watchers[f as usize].push(i as u32);
            }
        }
        let m = ops.len();
        Heuristic {
            task,
            kind,
            ops,
            watchers,
            no_pre,
            n_actions,
            cost: vec![None; n],
            done: vec![false; n],
            counters: vec![0; m],
            acc: vec![C::zero(); m],
            best: vec![NONE; n],
            heap: BinaryHeap::new(),
            marked: vec![false; m],
            stack: Vec::new(),
        }
    }

    pub fn kind(&self) -> HeuristicKind {
        self.kind
    }

    pub fn evaluate(&mut self, state: &State) -> Option<C> {
        if self.task.goal_unreachable() {
            return None;
        }
        if self.kind == HeuristicKind::Blind {
            return Some(C::zero());
        }
        self.explore(state)?;
        let goal = self.task.goal_pos();
        match self.kind {
            HeuristicKind::HMax => Some(
                goal.iter()
                    .fold(C::zero(), |m, &g| m.max_of(self.cost[g as usize].expect("goal reached"))),
            ),
            HeuristicKind::HAdd => Some(
                goal.iter()
                    .fold(C::zero(), |s, &g| s + self.cost[g as usize].expect("goal reached")),
            ),
            HeuristicKind::HFf => Some(self.relaxed_plan_cost()),
            HeuristicKind::Blind => unreachable!(),
        }
    }

    /// Runs the fixpoint; returns `None` if some goal fact is unreachable.
    fn explore(&mut self, state: &State) -> Option<()> {
        let max = self.kind == HeuristicKind::HMax;
        self.cost.iter_mut().for_each(|c| *c = None);
        self.done.iter_mut().for_each(|d| *d = false);
        self.best.iter_mut().for_each(|b| *b = NONE);
        for (i, op) in self.ops.iter().enumerate() {
            self.counters[i] = op.pre.len() as u32;
            self.acc[i] = C::zero();
        }
        self.heap.clear();
        for &f in state.facts() {
            self.cost[f as usize] = Some(C::zero());
            self.heap.push(Reverse((Key(C::zero()), f)));
        }
        for k in 0..self.no_pre.len() {
            let op = self.no_pre[k];
            self.fire(op, C::zero());
        }
        let goal = self.task.goal_pos();
        let mut pending = goal.iter().filter(|&&g| !state.contains(g)).count();
        let mut is_goal = vec![false; 0];
        if pending > 0 {
            is_goal = vec![false; self.cost.len()];
            for &g in goal {
                is_goal[g as usize] = true;
            }
            for &f in state.facts() {
                is_goal[f as usize] = false;
            }
        }
        while pending > 0 {
            let Reverse((Key(c), f)) = self.heap.pop()?;
            let fi = f as usize;
            if self.done[fi] {
                continue;
            }
            self.done[fi] = true;
            if is_goal[fi] {
                is_goal[fi] = false;
                pending -= 1;
            }
            for k in 0..self.watchers[fi].len() {
                let op = self.watchers[fi][k] as usize;
                self.counters[op] -= 1;
                self.acc[op] = if max { self.acc[op].max_of(c) } else { self.acc[op] + c };
                if self.counters[op] == 0 {
                    let base = self.acc[op];
                    self.fire(op as u32, base);
                }
            }
        }
        Some(())
    }

    fn fire(&mut self, op: u32, base: C) {
        let o = &self.ops[op as usize];
        let c = base + o.cost;
        for &f in &o.add {
            let fi = f as usize;
            let better = match self.cost[fi] {
                None => true,
                Some(old) => c.total_cmp(&old) == Ordering::Less,
            };
            if better && !self.done[fi] {
                self.cost[fi] = Some(c);
                self.best[fi] = op;
                self.heap.push(Reverse((Key(c), f)));
            }
        }
    }

    /// Actions of the last relaxed plan that are applicable in the evaluated
    /// state. Only meaningful right after an `HFf` evaluation.
    pub fn helpful_actions(&self, out: &mut Vec<u32>) {
        out.clear();
        if self.kind != HeuristicKind::HFf {
            return;
        }
        let zero = |f: &FactId| matches!(self.cost[*f as usize], Some(c) if c.total_cmp(&C::zero()) != Ordering::Greater);
        for (i, op) in self.ops[..self.n_actions].iter().enumerate() {
            if self.marked[i] && op.pre.iter().all(zero) {
                out.push(i as u32);
            }
        }
    }

    fn relaxed_plan_cost(&mut self) -> C {
        self.marked.iter_mut().for_each(|m| *m = false);
        let mut seen = vec![false; self.cost.len()];
        self.stack.clear();
        self.stack.extend_from_slice(self.task.goal_pos());
        let mut total = C::zero();
        while let Some(f) = self.stack.pop() {
            let fi = f as usize;
            if seen[fi] {
                continue;
            }
            seen[fi] = true;
            let op = self.best[fi];
            if op == NONE {
                continue;
            }
            let oi = op as usize;
            if self.marked[oi] {
                continue;
            }
            self.marked[oi] = true;
            if oi < self.n_actions {
                total = total + self.ops[oi].cost;
            }
            self.stack.extend_from_slice(&self.ops[oi].pre);
        }
        total
    }
}

/// One-shot heuristic evaluation.
pub fn heuristic<C: Cost>(
    state: &State,
    task: &GroundTask<C>,
    kind: HeuristicKind,
    cost_sensitive: bool,
) -> Option<C> {
    Heuristic::new(task, kind, cost_sensitive).evaluate(state)
}
