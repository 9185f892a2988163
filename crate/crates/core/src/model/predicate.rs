use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::object::{ObjectRef, ObjectRegistry};
use crate::{Error, Result};

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct PredicateId(pub(crate) u32);

impl PredicateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PredicateKind {
    /// Never changed by actions. Certified by the initial state or by streams.
    Static,
    /// Changed by action effects; closed world.
    Fluent,
    /// Defined by axioms over the current state.
    Derived,
}

#[derive(Clone, Debug)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub kind: PredicateKind,
}

#[derive(Clone, Debug, Default)]
pub struct PredicateTable {
    predicates: Vec<Predicate>,
    by_name: FxHashMap<String, PredicateId>,
}

impl PredicateTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a predicate. Redeclaring with an identical signature returns the existing id.
    pub fn declare(&mut self, name: &str, arity: usize, kind: PredicateKind) -> Result<PredicateId> {
        if let Some(&id) = self.by_name.get(name) {
            let p = &self.predicates[id.index()];
            if p.arity == arity && p.kind == kind {
                return Ok(id);
            }
            return Err(Error::InvalidSchema {
                schema: name.to_string(),
                reason: "predicate redeclared with a different signature".into(),
            });
        }
        let id = PredicateId(self.predicates.len() as u32);
        self.predicates.push(Predicate {
            name: name.to_string(),
            arity,
            kind,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<PredicateId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: PredicateId) -> &Predicate {
        &self.predicates[id.index()]
    }

    pub fn try_get(&self, id: PredicateId) -> Option<&Predicate> {
        self.predicates.get(id.index())
    }

    pub fn kind(&self, id: PredicateId) -> PredicateKind {
        self.predicates[id.index()].kind
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PredicateId, &Predicate)> {
        self.predicates
            .iter()
            .enumerate()
            .map(|(i, p)| (PredicateId(i as u32), p))
    }
}

pub type Args = SmallVec<[ObjectRef; 4]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub predicate: PredicateId,
    pub args: Args,
}

impl Atom {
    pub fn new(predicate: PredicateId, args: impl IntoIterator<Item = ObjectRef>) -> Self {
        Atom {
            predicate,
            args: args.into_iter().collect(),
        }
    }

    pub fn render(&self, predicates: &PredicateTable, registry: &ObjectRegistry) -> String {
        let name = &predicates.get(self.predicate).name;
        if self.args.is_empty() {
            return name.clone();
        }
        format!("{name}{}", registry.names(&self.args))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn render(&self, predicates: &PredicateTable, registry: &ObjectRegistry) -> String {
        let a = self.atom.render(predicates, registry);
        if self.positive {
            a
        } else {
            format!("¬{a}")
        }
    }
}
