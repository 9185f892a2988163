//! Types shared by the incremental and focused solvers.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::model::{Args, Atom, InstanceKey, ObjectRef, ObjectRegistry, ProblemInstance};
use crate::splan::{validate_plan, FailureReport, Plan, PlanningView, SearchConfig};

/// Resource limits for one solver run. `None` means unlimited.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub wall: Option<Duration>,
    pub max_splan_calls: Option<u64>,
    /// Limit on generator invocations, tests included.
    pub max_draws: Option<u64>,
}

impl Budget {
    pub fn wall(seconds: f64) -> Self {
        Budget {
            wall: Some(Duration::from_secs_f64(seconds)),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Solved(Plan),
    /// Every enabled stream instance is exhausted and no plan exists.
    Infeasible,
    Timeout,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Calls to the embedded planner.
    pub iterations: u64,
    /// Generator invocations, tests included.
    pub calls: u64,
    /// Generator invocations of test streams.
    pub test_calls: u64,
    /// Focused episodes that ended without a usable plan.
    pub resets: u64,
    pub runtime: Duration,
    pub expanded: u64,
}

/// One generator invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrawRecord {
    pub stream: usize,
    pub inputs: Args,
    pub produced: bool,
}

/// Step of a focused candidate plan, for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub name: String,
    /// Stream schema index for stream operators.
    pub stream: Option<usize>,
    pub args: Args,
}

/// One focused iteration: the candidate plan (empty after a reset) and the
/// blocked sets afterwards.
#[derive(Clone, Debug, Default)]
pub struct IterationTrace {
    pub plan: Option<Vec<TraceStep>>,
    pub reset: bool,
    pub temporarily_blocked: Vec<InstanceKey>,
    pub permanently_blocked: Vec<InstanceKey>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: Status,
    pub stats: RunStats,
    pub registry: ObjectRegistry,
    /// Objects known when the run stopped.
    pub objects: Vec<ObjectRef>,
    /// Initial atoms plus every certified atom.
    pub certified: Vec<Atom>,
    pub draws: Vec<DrawRecord>,
    pub trace: Vec<IterationTrace>,
    pub permanently_blocked: Vec<InstanceKey>,
}

impl SolveReport {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.status {
            Status::Solved(p) => Some(p),
            _ => None,
        }
    }

    pub fn solved(&self) -> bool {
        matches!(self.status, Status::Solved(_))
    }

    pub fn rendered_plan<C>(&self, problem: &ProblemInstance<C>) -> Option<Vec<String>> {
        self.plan().map(|p| p.render(&problem.operators, &self.registry))
    }

    /// Re-checks the returned plan against the certified atoms.
    pub fn validate<C>(&self, problem: &ProblemInstance<C>) -> Result<(), FailureReport> {
        let Some(plan) = self.plan() else {
            return Err(FailureReport {
                step: None,
                missing: Vec::new(),
                reason: "no plan".into(),
            });
        };
        let view = PlanningView {
            predicates: &problem.predicates,
            operators: &problem.operators,
            axioms: &problem.axioms,
            objects: &self.objects,
            init: &self.certified,
            goal: &problem.goal,
        };
        validate_plan(&view, plan)
    }
}

pub(crate) struct Clock {
    start: Instant,
    deadline: Option<Instant>,
    budget: Budget,
}

impl Clock {
    pub(crate) fn new(budget: &Budget) -> Self {
        let start = Instant::now();
        Clock {
            start,
            deadline: budget.wall.map(|w| start + w),
            budget: budget.clone(),
        }
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub(crate) fn may_plan(&self, stats: &RunStats) -> bool {
        !self.deadline.is_some_and(|d| Instant::now() >= d)
            && !self.budget.max_splan_calls.is_some_and(|m| stats.iterations >= m)
    }

    pub(crate) fn may_draw(&self, stats: &RunStats) -> bool {
        !self.deadline.is_some_and(|d| Instant::now() >= d)
            && !self.budget.max_draws.is_some_and(|m| stats.calls >= m)
    }

    /// Search config with the run deadline folded in.
    pub(crate) fn search_config(&self, base: &SearchConfig) -> SearchConfig {
        let mut c = base.clone();
        c.deadline = match (c.deadline, self.deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        c
    }
}
