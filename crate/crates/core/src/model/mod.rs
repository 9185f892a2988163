//! Objects, predicates, schemas, streams and problem instances.

mod enable;
mod index;
mod object;
mod predicate;
mod problem;
mod schema;
mod stream;

pub use enable::StreamEnabler;
pub use index::{join, AtomIndex};
pub use object::{ObjectRef, ObjectRegistry, Payload};
pub use predicate::{Args, Atom, Literal, Predicate, PredicateId, PredicateKind, PredicateTable};
pub(crate) use problem::check_goal;
pub use problem::ProblemInstance;
pub use schema::{
    ground_args, Arg, AtomPattern, AxiomBuilder, AxiomSchema, LiteralPattern, OperatorBuilder,
    OperatorSchema, Term,
};
pub use stream::{
    from_iter, instantiate_stream, CertificateCheck, Draw, Generator, GeneratorError, GeneratorFn,
    InstanceId, InstanceKey, InstancePool, StreamBuilder, StreamInstance, StreamSchema,
};
