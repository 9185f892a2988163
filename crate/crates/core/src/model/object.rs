use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

/// Opaque value carried by an object.
///
/// Reals compare and hash by bit pattern, so `0.0` and `-0.0` are distinct
/// objects and every `NaN` bit pattern equals only itself.
#[derive(Clone, Debug)]
pub enum Payload {
    Symbol(Arc<str>),
    Int(i64),
    Real(f64),
    Tuple(Vec<Payload>),
    /// Placeholder object used by the focused solver. Never produced by a generator.
    Abstract(u32),
}

impl Payload {
    pub fn symbol(s: &str) -> Self {
        Payload::Symbol(Arc::from(s))
    }

    /// `Name(v1, v2, ...)` encoded as a tuple headed by a symbol.
    pub fn tagged(tag: &str, values: impl IntoIterator<Item = Payload>) -> Self {
        let mut items = vec![Payload::symbol(tag)];
        items.extend(values);
        Payload::Tuple(items)
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Payload::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Payload::Real(x) => Some(*x),
            Payload::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    /// First value after the tag of a tagged tuple.
    pub fn tagged_value(&self) -> Option<&Payload> {
        match self {
            Payload::Tuple(items) if items.len() >= 2 && matches!(items[0], Payload::Symbol(_)) => {
                Some(&items[1])
            }
            _ => None,
        }
    }

    pub fn tag(&self) -> Option<&str> {
        match self {
            Payload::Tuple(items) => match items.first() {
                Some(Payload::Symbol(s)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn contains_abstract(&self) -> bool {
        match self {
            Payload::Abstract(_) => true,
            Payload::Tuple(items) => items.iter().any(Payload::contains_abstract),
            _ => false,
        }
    }
}

impl PartialEq for Payload {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Payload::Symbol(a), Payload::Symbol(b)) => a == b,
            (Payload::Int(a), Payload::Int(b)) => a == b,
            (Payload::Real(a), Payload::Real(b)) => a.to_bits() == b.to_bits(),
            (Payload::Tuple(a), Payload::Tuple(b)) => a == b,
            (Payload::Abstract(a), Payload::Abstract(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Payload {}

impl Hash for Payload {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Payload::Symbol(s) => s.hash(state),
            Payload::Int(i) => i.hash(state),
            Payload::Real(x) => x.to_bits().hash(state),
            Payload::Tuple(items) => items.hash(state),
            Payload::Abstract(i) => i.hash(state),
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Symbol(s) => f.write_str(s),
            Payload::Int(i) => write!(f, "{i}"),
            Payload::Real(x) => write!(f, "{x}"),
            Payload::Abstract(i) => write!(f, "#{i}"),
            Payload::Tuple(items) => {
                let (head, rest) = match items.split_first() {
                    Some((Payload::Symbol(s), rest)) if !rest.is_empty() => (s.as_ref(), rest),
                    _ => ("", items.as_slice()),
                };
                f.write_str(head)?;
                f.write_str("(")?;
                for (i, item) in rest.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Interned object handle. Equal payloads always map to the same handle.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ObjectRef(pub(crate) u32);

impl ObjectRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, Default)]
pub struct ObjectRegistry {
    values: Vec<Payload>,
    ids: FxHashMap<Payload, ObjectRef>,
}

impl ObjectRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, payload: Payload) -> ObjectRef {
        if let Some(&id) = self.ids.get(&payload) {
            return id;
        }
        let id = ObjectRef(self.values.len() as u32);
        self.values.push(payload.clone());
        self.ids.insert(payload, id);
        id
    }

    pub fn lookup(&self, payload: &Payload) -> Option<ObjectRef> {
        self.ids.get(payload).copied()
    }

    pub fn payload(&self, object: ObjectRef) -> &Payload {
        &self.values[object.index()]
    }

    pub fn is_abstract(&self, object: ObjectRef) -> bool {
        matches!(self.values.get(object.index()), Some(Payload::Abstract(_)))
    }

    /// The `i`-th placeholder object, created on first use.
    pub fn abstract_object(&mut self, i: u32) -> ObjectRef {
        self.intern(Payload::Abstract(i))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, object: ObjectRef) -> String {
        self.payload(object).to_string()
    }

    pub fn names(&self, objects: &[ObjectRef]) -> String {
        let parts: Vec<String> = objects.iter().map(|&o| self.name(o)).collect();
        format!("({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let mut reg = ObjectRegistry::new();
        let a = reg.intern(Payload::tagged("Pose", [Payload::Int(3)]));
        let b = reg.intern(Payload::tagged("Pose", [Payload::Int(3)]));
        let c = reg.intern(Payload::tagged("Conf", [Payload::Int(3)]));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.name(a), "Pose(3)");
    }

    #[test]
    fn reals_compare_by_bits() {
        let mut reg = ObjectRegistry::new();
        let a = reg.intern(Payload::Real(0.0));
        let b = reg.intern(Payload::Real(-0.0));
        let n1 = reg.intern(Payload::Real(f64::NAN));
        let n2 = reg.intern(Payload::Real(f64::NAN));
        assert_ne!(a, b);
        assert_eq!(n1, n2);
    }

    #[test]
    fn abstract_objects_are_flagged() {
        let mut reg = ObjectRegistry::new();
        let g = reg.abstract_object(1);
        let s = reg.intern(Payload::symbol("A"));
        assert!(reg.is_abstract(g));
        assert!(!reg.is_abstract(s));
        assert_eq!(reg.abstract_object(1), g);
    }
}
