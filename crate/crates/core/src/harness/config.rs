use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domains::{build_continuous, build_discrete, ContinuousConfig, DiscreteConfig, KinVariant, Layout};
use crate::focused::FocusedConfig;
use crate::incremental::IncrementalConfig;
use crate::solve::Budget;
use crate::splan::{SearchConfig, Strategy};
use crate::{Error, Problem, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// Discrete holding problem with block `A` at `p0`.
    Discrete,
    /// Continuous holding problem with block `A` at `p0`.
    Continuous,
    /// Continuous obstruction problem with `n` extra pose constants.
    Obstruction,
    /// Continuous obstruction problem with `n` parked blocks.
    Distractor,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Incremental,
    Focused,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

fn parse_err(key: &str, value: &str) -> Error {
    Error::InvalidConfig(format!("bad value `{value}` for `{key}`"))
}

impl FromStr for DomainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "discrete" => Ok(DomainKind::Discrete),
            "continuous" => Ok(DomainKind::Continuous),
            "obstruction" => Ok(DomainKind::Obstruction),
            "distractor" => Ok(DomainKind::Distractor),
            _ => Err(parse_err("domain", s)),
        }
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "incremental" | "inc" => Ok(AlgorithmKind::Incremental),
            "focused" | "foc" => Ok(AlgorithmKind::Focused),
            _ => Err(parse_err("algo", s)),
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            _ => Err(parse_err("format", s)),
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Discrete => "discrete",
            DomainKind::Continuous => "continuous",
            DomainKind::Obstruction => "obstruction",
            DomainKind::Distractor => "distractor",
        })
    }
}

/// One run: problem, algorithm, budget and seed.
///
/// Field names match the command line flags and the keys of the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainKind,
    pub kin: KinVariant,
    /// Initial pose of `A`. Defaults to 100 (discrete) or 5 (continuous).
    pub p0: Option<i64>,
    pub delta: f64,
    pub n: usize,
    pub algo: AlgorithmKind,
    pub k: usize,
    pub theta: usize,
    pub eager_commits: usize,
    pub strategy: Strategy,
    pub timeout_s: f64,
    pub max_splan_calls: Option<u64>,
    pub max_draws: Option<u64>,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: DomainKind::Discrete,
            kin: KinVariant::C,
            p0: None,
            delta: 1.5,
            n: 0,
            algo: AlgorithmKind::Incremental,
            k: 1,
            theta: 5,
            eager_commits: 0,
            strategy: Strategy::Gbfs,
            timeout_s: 120.0,
            max_splan_calls: None,
            max_draws: None,
            seed: 0,
            format: Format::Csv,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| parse_err(key, value))
}

fn limit(key: &str, value: &str) -> Result<Option<u64>> {
    match value.trim() {
        "" | "none" => Ok(None),
        v => num(key, v).map(Some),
    }
}

impl RunConfig {
    /// Sets one field from its flag name. Case and `-`/`_` are not significant.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().trim_start_matches("--").to_ascii_lowercase().replace('_', "-");
        let v = value.trim();
        match k.as_str() {
            "domain" => self.domain = v.parse()?,
            "kin" => self.kin = v.parse()?,
            "p0" => self.p0 = Some(num(&k, v)?),
            "delta" => self.delta = num(&k, v)?,
            "n" => self.n = num(&k, v)?,
            "algo" | "algorithm" => self.algo = v.parse()?,
            "k" => self.k = num(&k, v)?,
            "theta" => self.theta = num(&k, v)?,
            "eager-commits" => self.eager_commits = num(&k, v)?,
            "strategy" => {
                self.strategy = match v.to_ascii_lowercase().as_str() {
                    "gbfs" => Strategy::Gbfs,
                    "astar" | "a*" => Strategy::AStar,
                    _ => return Err(parse_err(&k, v)),
                }
            }
            "timeout" => self.timeout_s = num(&k, v)?,
            "max-splan-calls" => self.max_splan_calls = limit(&k, v)?,
            "max-draws" => self.max_draws = limit(&k, v)?,
            "seed" => self.seed = num(&k, v)?,
            "format" => self.format = v.parse()?,
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", i + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if self.theta == 0 {
            return Err(Error::InvalidConfig("theta must be at least 1".into()));
        }
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return Err(Error::InvalidConfig("timeout must be positive".into()));
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_splan_calls: self.max_splan_calls,
            max_draws: self.max_draws,
            ..Budget::wall(self.timeout_s)
        }
    }

    fn search(&self) -> SearchConfig {
        match self.strategy {
            Strategy::Gbfs => SearchConfig::default(),
            Strategy::AStar => SearchConfig::optimal(),
        }
    }

    pub fn incremental(&self) -> IncrementalConfig {
        IncrementalConfig {
            k: self.k,
            search: self.search(),
            budget: self.budget(),
            ..IncrementalConfig::default()
        }
    }

    pub fn focused(&self) -> FocusedConfig {
        FocusedConfig {
            theta: self.theta,
            eager_commits: self.eager_commits,
            search: self.search(),
            budget: self.budget(),
            ..FocusedConfig::default()
        }
    }

    pub fn p0(&self) -> i64 {
        self.p0.unwrap_or(match self.domain {
            DomainKind::Discrete => 100,
            _ => 5,
        })
    }

    /// Builds the problem. Continuous samplers are seeded with `seed`.
    pub fn build(&self) -> Result<Problem> {
        match self.domain {
            DomainKind::Discrete => build_discrete(&DiscreteConfig::holding(self.p0(), self.kin)),
            DomainKind::Continuous => {
                build_continuous(&ContinuousConfig::simple(self.p0() as f64, self.kin, self.delta, self.seed))
            }
            DomainKind::Obstruction => {
                let Layout::Obstruction { p0, obstacle, goal, .. } = Layout::obstruction() else {
                    unreachable!()
                };
                let layout = Layout::Obstruction {
                    p0,
                    obstacle,
                    goal,
                    extra_poses: self.n,
                };
                let mut cfg = ContinuousConfig::new(layout, self.kin, self.delta, self.seed);
                cfg.eager_collision_tests = self.n > 0;
                build_continuous(&cfg)
            }
            DomainKind::Distractor => build_continuous(&ContinuousConfig::new(
                Layout::Distractor { n: self.n },
                self.kin,
                self.delta,
                self.seed,
            )),
        }
    }

    pub fn problem_id(&self) -> String {
        match self.domain {
            DomainKind::Discrete => format!("discrete/{}/p0={}", self.kin, self.p0()),
            DomainKind::Continuous => format!("continuous/{}/delta={}", self.kin, self.delta),
            DomainKind::Obstruction if self.n > 0 => format!("obstruction/{}/d={}", self.kin, self.n),
            DomainKind::Obstruction => format!("obstruction/{}", self.kin),
            DomainKind::Distractor => format!("distractor/n={}", self.n),
        }
    }

    pub fn algorithm_id(&self) -> String {
        match self.algo {
            AlgorithmKind::Incremental => format!("incremental/K={}", self.k),
            AlgorithmKind::Focused if self.eager_commits > 0 => {
                format!("focused/theta={}/E={}", self.theta, self.eager_commits)
            }
            AlgorithmKind::Focused => format!("focused/theta={}", self.theta),
        }
    }

    /// Row and column-group labels of the markdown grid.
    pub fn table_labels(&self) -> (String, String) {
        match self.domain {
            DomainKind::Discrete => (format!("p0={}", self.p0()), self.kin.to_string()),
            DomainKind::Continuous => (format!("delta={}", self.delta), self.kin.to_string()),
            _ => (self.problem_id(), self.algorithm_id()),
        }
    }
}
