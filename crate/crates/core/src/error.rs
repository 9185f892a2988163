use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stream `{stream}` expects {expected} inputs, got {got}")]
    ArityMismatch {
        stream: String,
        expected: usize,
        got: usize,
    },

    #[error("input conditions of `{stream}` are not certified: {missing:?}")]
    InputConditionsUnmet { stream: String, missing: Vec<String> },

    #[error("generator fault in {stream}{inputs}: {message}")]
    GeneratorFault {
        stream: String,
        inputs: String,
        message: String,
    },

    #[error("goal references unknown predicate `{0}`")]
    GoalPredicateUnknown(String),

    #[error("schema `{schema}` uses unbound variable `{var}`")]
    UnboundSchemaVariable { schema: String, var: String },

    #[error("invalid schema `{schema}`: {reason}")]
    InvalidSchema { schema: String, reason: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("layout infeasible: {0}")]
    LayoutInfeasible(String),

    #[error("internal fault: {0}")]
    InternalFault(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
