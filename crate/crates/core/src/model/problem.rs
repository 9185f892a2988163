use rustc_hash::FxHashSet;

use super::object::{ObjectRef, ObjectRegistry, Payload};
use super::predicate::{Atom, Literal, PredicateId, PredicateKind, PredicateTable};
use super::schema::{AtomPattern, AxiomSchema, OperatorSchema, Term};
use super::stream::StreamSchema;
use crate::{Error, Result};

/// A planning problem with streams.
#[derive(Clone, Debug)]
pub struct ProblemInstance<C> {
    pub name: String,
    pub predicates: PredicateTable,
    pub registry: ObjectRegistry,
    /// Initial objects.
    pub objects: Vec<ObjectRef>,
    /// Initial static and fluent atoms.
    pub init: Vec<Atom>,
    pub goal: Vec<Literal>,
    pub operators: Vec<OperatorSchema<C>>,
    pub axioms: Vec<AxiomSchema>,
    pub streams: Vec<StreamSchema<C>>,
}

impl<C> ProblemInstance<C> {
    pub fn new(name: &str) -> Self {
        ProblemInstance {
            name: name.to_string(),
            predicates: PredicateTable::new(),
            registry: ObjectRegistry::new(),
            objects: Vec::new(),
            init: Vec::new(),
            goal: Vec::new(),
            operators: Vec::new(),
            axioms: Vec::new(),
            streams: Vec::new(),
        }
    }

    pub fn declare(&mut self, name: &str, arity: usize, kind: PredicateKind) -> Result<PredicateId> {
        self.predicates.declare(name, arity, kind)
    }

    /// Interns `payload` and records it as an initial object.
    pub fn object(&mut self, payload: Payload) -> ObjectRef {
        let o = self.registry.intern(payload);
        if !self.objects.contains(&o) {
            self.objects.push(o);
        }
        o
    }

    pub fn init_atom(&mut self, predicate: PredicateId, args: impl IntoIterator<Item = ObjectRef>) {
        let atom = Atom::new(predicate, args);
        if !self.init.contains(&atom) {
            self.init.push(atom);
        }
    }

    pub fn goal_atom(&mut self, predicate: PredicateId, args: impl IntoIterator<Item = ObjectRef>) {
        self.goal.push(Literal::pos(Atom::new(predicate, args)));
    }

    pub fn goal_not(&mut self, predicate: PredicateId, args: impl IntoIterator<Item = ObjectRef>) {
        self.goal.push(Literal::neg(Atom::new(predicate, args)));
    }

    pub fn operator_index(&self, name: &str) -> Option<usize> {
        self.operators.iter().position(|o| o.name == name)
    }

    pub fn stream_index(&self, name: &str) -> Option<usize> {
        self.streams.iter().position(|s| s.name == name)
    }

    /// Checks predicate kinds and arities of every pattern, atom and goal literal.
    pub fn validate(&self) -> Result<()> {
        check_goal(&self.predicates, &self.goal)?;
        let known: FxHashSet<ObjectRef> = self.objects.iter().copied().collect();
        for a in &self.init {
            let p = self.predicates.try_get(a.predicate).ok_or_else(|| invalid("init", "unknown predicate"))?;
            if p.arity != a.args.len() {
                return Err(invalid("init", &format!("arity mismatch in {}", p.name)));
            }
            if p.kind == PredicateKind::Derived {
                return Err(invalid("init", &format!("derived atom {} in initial state", p.name)));
            }
            if a.args.iter().any(|o| !known.contains(o)) {
                return Err(invalid("init", &format!("atom {} mentions an undeclared object", p.name)));
            }
        }
        use PredicateKind::*;
        for op in &self.operators {
            let n = op.arity();
            for p in &op.stat {
                self.check_pattern(&op.name, p, n, &[Static])?;
            }
            for l in &op.pre {
                self.check_pattern(&op.name, &l.atom, n, &[Fluent, Derived])?;
            }
            for l in &op.eff {
                self.check_pattern(&op.name, &l.atom, n, &[Fluent])?;
            }
        }
        for ax in &self.axioms {
            let n = ax.arity();
            for p in &ax.stat {
                self.check_pattern(&ax.name, p, n, &[Static])?;
            }
            for l in &ax.pre {
                self.check_pattern(&ax.name, &l.atom, n, &[Fluent, Derived])?;
            }
            self.check_pattern(&ax.name, &ax.head, n, &[Derived])?;
        }
        for s in &self.streams {
            let n = s.n_vars();
            for p in s.inp.iter().chain(&s.out) {
                self.check_pattern(&s.name, p, n, &[Static])?;
            }
        }
        Ok(())
    }

    fn check_pattern(&self, schema: &str, p: &AtomPattern, n_vars: usize, kinds: &[PredicateKind]) -> Result<()> {
        let pred = self
            .predicates
            .try_get(p.predicate)
            .ok_or_else(|| invalid(schema, "unknown predicate"))?;
        if pred.arity != p.args.len() {
            return Err(invalid(
                schema,
                &format!("{} expects {} arguments, got {}", pred.name, pred.arity, p.args.len()),
            ));
        }
        if !kinds.contains(&pred.kind) {
            return Err(invalid(
                schema,
                &format!("{} is {:?}, expected one of {:?}", pred.name, pred.kind, kinds),
            ));
        }
        for t in &p.args {
            if let Term::Var(v) = t {
                if *v >= n_vars {
                    return Err(invalid(schema, "variable out of range"));
                }
            }
        }
        Ok(())
    }
}

fn invalid(schema: &str, reason: &str) -> Error {
    Error::InvalidSchema {
        schema: schema.to_string(),
        reason: reason.to_string(),
    }
}

pub(crate) fn check_goal(predicates: &PredicateTable, goal: &[Literal]) -> Result<()> {
    for l in goal {
        match predicates.try_get(l.atom.predicate) {
            None => return Err(Error::GoalPredicateUnknown(format!("#{}", l.atom.predicate.index()))),
            Some(p) if p.arity != l.atom.args.len() => {
                return Err(Error::GoalPredicateUnknown(format!(
                    "{} (expects {} arguments, got {})",
                    p.name,
                    p.arity,
                    l.atom.args.len()
                )))
            }
            Some(_) => {}
        }
    }
    Ok(())
}
