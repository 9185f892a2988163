//! Embedded finite STRIPS planner with derived predicates.
//!
//! [`ground`] turns a lifted task into a [`GroundTask`] by relaxed
//! reachability, [`search`] runs A* or greedy best-first search with one of
//! the delete-relaxation heuristics, and [`s_plan`] chains the two.

mod axioms;
mod ground;
mod heuristic;
mod plan;
mod search;
mod validate;

use std::time::Instant;

pub use axioms::{evaluate_axioms, AxiomEvaluator};
pub use ground::{
    ground, FactId, GroundAction, GroundAxiom, GroundTask, Grounder, GroundingInput, GroundingMode, State,
};
pub use heuristic::{heuristic, Heuristic, HeuristicKind};
pub use plan::{Plan, PlanStep, RenderedStep};
pub use search::{eliminate_redundant, search, shortcut, SearchConfig, SearchOutcome, SearchStats, Strategy};
pub use validate::{validate_plan, FailureReport, PlanningView};

use crate::{Cost, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SPlanOutcome {
    Plan(Plan),
    /// The finite task has no solution.
    Infeasible,
    /// The search budget ran out before a verdict.
    Timeout,
}

#[derive(Clone, Debug)]
pub struct SPlanResult {
    pub outcome: SPlanOutcome,
    pub stats: SearchStats,
    pub n_facts: usize,
    pub n_actions: usize,
}

/// Grounds and solves a finite task.
pub fn s_plan<C: Cost>(input: &GroundingInput<'_, C>, config: &SearchConfig) -> Result<SPlanResult> {
    let task = ground(input)?;
    Ok(solve_task(&task, config))
}

/// Solves an already grounded task.
pub fn solve_task<C: Cost>(task: &GroundTask<C>, config: &SearchConfig) -> SPlanResult {
    let (n_facts, n_actions) = (task.num_facts(), task.actions.len());
    if config.deadline.is_some_and(|d| Instant::now() >= d) {
        return SPlanResult {
            outcome: SPlanOutcome::Timeout,
            stats: SearchStats::default(),
            n_facts,
            n_actions,
        };
    }
    let (outcome, stats) = search(task, config);
    let outcome = match outcome {
        SearchOutcome::Plan(ids) => SPlanOutcome::Plan(Plan {
            steps: ids
                .into_iter()
                .map(|i| PlanStep {
                    operator: task.actions[i].operator,
                    args: task.actions[i].args.clone(),
                })
                .collect(),
        }),
        SearchOutcome::Infeasible => SPlanOutcome::Infeasible,
        SearchOutcome::Timeout => SPlanOutcome::Timeout,
    };
    SPlanResult {
        outcome,
        stats,
        n_facts,
        n_actions,
    }
}
