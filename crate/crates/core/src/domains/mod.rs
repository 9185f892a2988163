//! Built-in one-dimensional pick-and-place domains.

pub mod continuous;
pub mod discrete;
pub mod kinematics;
pub mod pick_place;
pub mod sampler;

pub use continuous::{build_continuous, ContinuousConfig, Layout};
pub use discrete::{build_discrete, DiscreteConfig, DiscreteGoal, KinVariant};
pub use kinematics::{collision_free, kin_valid, KinematicsRule};
pub use pick_place::Vocabulary;
pub use sampler::{SamplerKind, UnitSampler};
