//! STRIPS planning over infinite object universes.
//!
//! Problems are ordinary STRIPS domains (static and fluent predicates,
//! operator and axiom schemas) extended with *streams*: certified
//! conditional generators that produce new objects together with static
//! atoms those objects are guaranteed to satisfy. Two solvers reduce such a
//! problem to a sequence of finite planning tasks handed to the embedded
//! planner in [`splan`]:
//!
//! * [`incremental`] alternates planning with fair, batched stream draws;
//! * [`focused`] plans with placeholder objects and stream operators and only
//!   draws from the streams a candidate plan actually needs.
//!
//! The core is generic over the action cost scalar (see [`Cost`]). The
//! aliases at the bottom of this file fix it to exact rationals, which is
//! what the built-in domains and the command line use.

pub mod domains;
mod error;
pub mod focused;
pub mod harness;
pub mod incremental;
pub mod model;
mod scalar;
pub mod solve;
pub mod splan;

pub use error::{Error, Result};
pub use scalar::Cost;

/// Exact non-negative rational cost.
pub type Rational = num_rational::Ratio<u64>;

pub type Problem = model::ProblemInstance<Rational>;
pub type Operator = model::OperatorSchema<Rational>;
pub type Stream = model::StreamSchema<Rational>;
pub type Task = splan::GroundTask<Rational>;
pub type Report = solve::SolveReport;

/// Integer-cost variants, handy for oracles and benchmarks that only use unit costs.
pub type IntProblem = model::ProblemInstance<u64>;
pub type IntTask = splan::GroundTask<u64>;

/// Floating-point cost variants.
pub type FloatProblem = model::ProblemInstance<f64>;
pub type FloatTask = splan::GroundTask<f64>;
