use super::object::ObjectRef;
use super::predicate::{Args, Atom, PredicateId};
use crate::{Error, Result};

/// Argument position of a schema pattern.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(usize),
    Obj(ObjectRef),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AtomPattern {
    pub predicate: PredicateId,
    pub args: Vec<Term>,
}

impl AtomPattern {
    /// Instantiates the pattern. Every variable must be bound in `binding`.
    pub fn ground(&self, binding: &[ObjectRef]) -> Atom {
        Atom {
            predicate: self.predicate,
            args: self
                .args
                .iter()
                .map(|t| match *t {
                    Term::Var(v) => binding[v],
                    Term::Obj(o) => o,
                })
                .collect(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.args.iter().filter_map(|t| match *t {
            Term::Var(v) => Some(v),
            Term::Obj(_) => None,
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LiteralPattern {
    pub atom: AtomPattern,
    pub positive: bool,
}

/// Lifted action. `stat` holds static preconditions; `pre` and `eff` hold
/// fluent or derived literals.
#[derive(Clone, Debug)]
pub struct OperatorSchema<C> {
    pub name: String,
    pub params: Vec<String>,
    pub stat: Vec<AtomPattern>,
    pub pre: Vec<LiteralPattern>,
    pub eff: Vec<LiteralPattern>,
    pub cost: C,
}

impl<C> OperatorSchema<C> {
    pub fn build(name: &str, params: &[&str]) -> OperatorBuilder<C> {
        OperatorBuilder {
            inner: PatternBuilder::new(name, params),
            eff: Vec::new(),
            cost: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// Positive static and fluent conditions, in declaration order.
    pub fn positive_conditions(&self) -> Vec<AtomPattern> {
        self.stat
            .iter()
            .cloned()
            .chain(self.pre.iter().filter(|l| l.positive).map(|l| l.atom.clone()))
            .collect()
    }

    pub fn adds(&self) -> impl Iterator<Item = &AtomPattern> {
        self.eff.iter().filter(|l| l.positive).map(|l| &l.atom)
    }

    pub fn dels(&self) -> impl Iterator<Item = &AtomPattern> {
        self.eff.iter().filter(|l| !l.positive).map(|l| &l.atom)
    }
}

/// Derived-predicate rule: `head` holds whenever `stat` and `pre` hold.
#[derive(Clone, Debug)]
pub struct AxiomSchema {
    pub name: String,
    pub params: Vec<String>,
    pub stat: Vec<AtomPattern>,
    pub pre: Vec<LiteralPattern>,
    pub head: AtomPattern,
}

impl AxiomSchema {
    pub fn build(name: &str, params: &[&str]) -> AxiomBuilder {
        AxiomBuilder {
            inner: PatternBuilder::new(name, params),
            head: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn positive_conditions(&self) -> Vec<AtomPattern> {
        self.stat
            .iter()
            .cloned()
            .chain(self.pre.iter().filter(|l| l.positive).map(|l| l.atom.clone()))
            .collect()
    }
}

/// Argument given to a builder: a parameter name or a constant object.
#[derive(Clone, Debug)]
pub enum Arg {
    Var(String),
    Obj(ObjectRef),
}

impl From<&str> for Arg {
    fn from(s: &str) -> Self {
        Arg::Var(s.to_string())
    }
}

impl From<String> for Arg {
    fn from(s: String) -> Self {
        Arg::Var(s)
    }
}

impl From<ObjectRef> for Arg {
    fn from(o: ObjectRef) -> Self {
        Arg::Obj(o)
    }
}

/// Shorthand for building argument lists: `args!["B", "P", obj]`.
#[macro_export]
macro_rules! args {
    ($($a:expr),* $(,)?) => {
        vec![$($crate::model::Arg::from($a)),*]
    };
}

pub(crate) struct PatternBuilder {
    pub(crate) name: String,
    pub(crate) params: Vec<String>,
    pub(crate) stat: Vec<AtomPattern>,
    pub(crate) pre: Vec<LiteralPattern>,
    pub(crate) error: Option<Error>,
}

impl PatternBuilder {
    pub(crate) fn new(name: &str, params: &[&str]) -> Self {
        let mut error = None;
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                error = Some(Error::InvalidSchema {
                    schema: name.to_string(),
                    reason: format!("duplicate parameter `{p}`"),
                });
            }
        }
        PatternBuilder {
            name: name.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            stat: Vec::new(),
            pre: Vec::new(),
            error,
        }
    }

    pub(crate) fn pattern(&mut self, predicate: PredicateId, args: Vec<Arg>) -> AtomPattern {
        let mut terms = Vec::with_capacity(args.len());
        for a in args {
            match a {
                Arg::Obj(o) => terms.push(Term::Obj(o)),
                Arg::Var(v) => match self.params.iter().position(|p| *p == v) {
                    Some(i) => terms.push(Term::Var(i)),
                    None => {
                        if self.error.is_none() {
                            self.error = Some(Error::UnboundSchemaVariable {
                                schema: self.name.clone(),
                                var: v,
                            });
                        }
                        terms.push(Term::Var(usize::MAX));
                    }
                },
            }
        }
        AtomPattern {
            predicate,
            args: terms,
        }
    }

    fn check(&mut self) -> Result<()> {
        match self.error.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

pub struct OperatorBuilder<C> {
    inner: PatternBuilder,
    eff: Vec<LiteralPattern>,
    cost: Option<C>,
}

impl<C: crate::Cost> OperatorBuilder<C> {
    pub fn stat(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let p = self.inner.pattern(predicate, args);
        self.inner.stat.push(p);
        self
    }

    pub fn pre(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let atom = self.inner.pattern(predicate, args);
        self.inner.pre.push(LiteralPattern { atom, positive: true });
        self
    }

    pub fn pre_not(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let atom = self.inner.pattern(predicate, args);
        self.inner.pre.push(LiteralPattern { atom, positive: false });
        self
    }

    pub fn add(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let atom = self.inner.pattern(predicate, args);
        self.eff.push(LiteralPattern { atom, positive: true });
        self
    }

    pub fn del(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let atom = self.inner.pattern(predicate, args);
        self.eff.push(LiteralPattern { atom, positive: false });
        self
    }

    pub fn cost(mut self, cost: C) -> Self {
        self.cost = Some(cost);
        self
    }

    /// Default cost is one.
    pub fn finish(mut self) -> Result<OperatorSchema<C>> {
        self.inner.check()?;
        let cost = self.cost.unwrap_or_else(C::one);
        if !cost.is_non_negative() {
            return Err(Error::InvalidSchema {
                schema: self.inner.name,
                reason: "negative action cost".into(),
            });
        }
        Ok(OperatorSchema {
            name: self.inner.name,
            params: self.inner.params,
            stat: self.inner.stat,
            pre: self.inner.pre,
            eff: self.eff,
            cost,
        })
    }
}

pub struct AxiomBuilder {
    inner: PatternBuilder,
    head: Option<AtomPattern>,
}

impl AxiomBuilder {
    pub fn stat(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let p = self.inner.pattern(predicate, args);
        self.inner.stat.push(p);
        self
    }

    pub fn pre(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let atom = self.inner.pattern(predicate, args);
        self.inner.pre.push(LiteralPattern { atom, positive: true });
        self
    }

    pub fn pre_not(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let atom = self.inner.pattern(predicate, args);
        self.inner.pre.push(LiteralPattern { atom, positive: false });
        self
    }

    pub fn head(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        self.head = Some(self.inner.pattern(predicate, args));
        self
    }

    pub fn finish(mut self) -> Result<AxiomSchema> {
        self.inner.check()?;
        let head = self.head.ok_or_else(|| Error::InvalidSchema {
            schema: self.inner.name.clone(),
            reason: "axiom without head".into(),
        })?;
        Ok(AxiomSchema {
            name: self.inner.name,
            params: self.inner.params,
            stat: self.inner.stat,
            pre: self.inner.pre,
            head,
        })
    }
}

/// Grounds an argument vector into an `Args` tuple.
pub fn ground_args(terms: &[Term], binding: &[ObjectRef]) -> Args {
    terms
        .iter()
        .map(|t| match *t {
            Term::Var(v) => binding[v],
            Term::Obj(o) => o,
        })
        .collect()
}
