use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmKind, DomainKind, RunConfig};
use crate::domains::KinVariant;
use crate::focused::solve_focused;
use crate::incremental::solve_incremental;
use crate::solve::Status;
use crate::{Error, Result};

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    /// `solved`, `infeasible`, `timeout` or `error`.
    pub status: String,
    pub success: bool,
    pub runtime_s: f64,
    /// Planner calls.
    pub iterations: u64,
    /// Generator calls, tests included.
    pub calls: u64,
    pub test_calls: u64,
    pub resets: u64,
    pub plan_length: Option<usize>,
    pub plan: Option<Vec<String>>,
    pub error: Option<String>,
    pub config: RunConfig,
}

impl ResultRecord {
    fn failed(config: &RunConfig, err: &Error) -> Self {
        ResultRecord {
            problem: config.problem_id(),
            algorithm: config.algorithm_id(),
            seed: config.seed,
            status: "error".into(),
            success: false,
            runtime_s: 0.0,
            iterations: 0,
            calls: 0,
            test_calls: 0,
            resets: 0,
            plan_length: None,
            plan: None,
            error: Some(err.to_string()),
            config: config.clone(),
        }
    }
}

/// Builds the problem, solves it under the budget and re-validates any plan.
pub fn run_single(config: &RunConfig) -> Result<ResultRecord> {
    config.validate()?;
    let problem = config.build()?;
    let report = match config.algo {
        AlgorithmKind::Incremental => solve_incremental(&problem, &config.incremental())?,
        AlgorithmKind::Focused => solve_focused(&problem, &config.focused())?,
    };
    if report.solved() {
        report
            .validate(&problem)
            .map_err(|f| Error::InternalFault(format!("returned plan does not validate: {f:?}")))?;
    }
    let status = match report.status {
        Status::Solved(_) => "solved",
        Status::Infeasible => "infeasible",
        Status::Timeout => "timeout",
    };
    let plan = report.rendered_plan(&problem);
    Ok(ResultRecord {
        problem: config.problem_id(),
        algorithm: config.algorithm_id(),
        seed: config.seed,
        status: status.into(),
        success: report.solved(),
        runtime_s: report.stats.runtime.as_secs_f64(),
        iterations: report.stats.iterations,
        calls: report.stats.calls,
        test_calls: report.stats.test_calls,
        resets: report.stats.resets,
        plan_length: plan.as_ref().map(Vec::len),
        plan,
        error: None,
        config: config.clone(),
    })
}

/// Runs `trials` copies of `config` with seeds `seed, seed + 1, ...`.
/// Faults become failed records.
pub fn run_trials(config: &RunConfig, trials: usize) -> Vec<ResultRecord> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let c = RunConfig {
                seed: config.seed.wrapping_add(t),
                ..config.clone()
            };
            run_single(&c).unwrap_or_else(|e| ResultRecord::failed(&c, &e))
        })
        .collect()
}

/// Aggregate of the trials of one (problem, algorithm) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub problem: String,
    pub algorithm: String,
    pub trials: usize,
    pub success_pct: f64,
    /// Median over successful trials.
    pub median_t_s: Option<f64>,
    /// Median over successful trials, or over all trials when none succeeded.
    pub median_i: Option<f64>,
    pub median_c: Option<f64>,
    /// Base seed.
    pub seed: u64,
    #[serde(skip)]
    pub labels: (String, String),
}

pub fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[m] } else { (xs[m - 1] + xs[m]) / 2.0 })
}

/// Aggregates the records of one configuration. `records` must be non-empty.
pub fn aggregate(config: &RunConfig, records: &[ResultRecord]) -> Row {
    let solved: Vec<&ResultRecord> = records.iter().filter(|r| r.success).collect();
    let basis: Vec<&ResultRecord> = if solved.is_empty() { records.iter().collect() } else { solved.clone() };
    let col = |f: &dyn Fn(&ResultRecord) -> f64, rs: &[&ResultRecord]| median(&mut rs.iter().map(|r| f(r)).collect::<Vec<_>>());
    Row {
        problem: config.problem_id(),
        algorithm: config.algorithm_id(),
        trials: records.len(),
        success_pct: if records.is_empty() { 0.0 } else { 100.0 * solved.len() as f64 / records.len() as f64 },
        median_t_s: col(&|r| r.runtime_s, &solved),
        median_i: col(&|r| r.iterations as f64, &basis),
        median_c: col(&|r| r.calls as f64, &basis),
        seed: config.seed,
        labels: config.table_labels(),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Discrete holding, `p0` in {1, 100, 1000}, each Kin variant, incremental K=1.
    Table1,
    /// Continuous holding, gripper width in {1.5, 1.01}, each Kin variant, incremental K=1.
    Table2,
    /// Distractor blocks n in {0, 8, 16} against incremental K=1, K=100 and focused.
    Distractor,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table1" => Ok(Suite::Table1),
            "table2" => Ok(Suite::Table2),
            "distractor" => Ok(Suite::Distractor),
            _ => Err(Error::InvalidConfig(format!("unknown suite `{s}`"))),
        }
    }
}

/// Draw budget of the continuous Kin-U and Kin-T rows.
pub const TABLE2_KIN_U_DRAWS: u64 = 1000;
pub const TABLE2_KIN_T_DRAWS: u64 = 20_000;

impl Suite {
    /// Configurations of the suite, in table order.
    pub fn configs(self, base: &RunConfig) -> Vec<RunConfig> {
        let kins = [KinVariant::U, KinVariant::T, KinVariant::C];
        let mut out = Vec::new();
        match self {
            Suite::Table1 => {
                for p0 in [1, 100, 1000] {
                    for kin in kins {
                        out.push(RunConfig {
                            domain: DomainKind::Discrete,
                            kin,
                            p0: Some(p0),
                            algo: AlgorithmKind::Incremental,
                            k: 1,
                            ..base.clone()
                        });
                    }
                }
            }
            Suite::Table2 => {
                for delta in [1.5, 1.01] {
                    for kin in kins {
                        out.push(RunConfig {
                            domain: DomainKind::Continuous,
                            kin,
                            p0: None,
                            delta,
                            algo: AlgorithmKind::Incremental,
                            k: 1,
                            max_draws: match kin {
                                KinVariant::U => Some(TABLE2_KIN_U_DRAWS),
                                KinVariant::T => Some(TABLE2_KIN_T_DRAWS),
                                KinVariant::C => base.max_draws,
                            },
                            ..base.clone()
                        });
                    }
                }
            }
            Suite::Distractor => {
                for n in [0, 8, 16] {
                    for (algo, k) in [
                        (AlgorithmKind::Incremental, 1),
                        (AlgorithmKind::Incremental, 100),
                        (AlgorithmKind::Focused, base.k),
                    ] {
                        out.push(RunConfig {
                            domain: DomainKind::Distractor,
                            kin: KinVariant::C,
                            n,
                            algo,
                            k,
                            ..base.clone()
                        });
                    }
                }
            }
        }
        out
    }
}

/// Runs every configuration `trials` times and aggregates one row per configuration.
pub fn run_suite(configs: &[RunConfig], trials: usize) -> Result<(Vec<Row>, Vec<ResultRecord>)> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let per_config: Vec<Vec<ResultRecord>> = configs.par_iter().map(|c| run_trials(c, trials)).collect();
    let rows = configs.iter().zip(&per_config).map(|(c, rs)| aggregate(c, rs)).collect();
    Ok((rows, per_config.into_iter().flatten().collect()))
}
