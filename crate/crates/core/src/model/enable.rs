use rustc_hash::FxHashSet;

use super::index::{join, AtomIndex};
use super::object::ObjectRef;
use super::predicate::Atom;
use super::stream::{InstanceKey, StreamSchema};

/// Tracks which stream instances have been enabled so far and finds the
/// newly enabled ones after the certified atom set grows.
#[derive(Debug, Default)]
pub struct StreamEnabler {
    seen: FxHashSet<InstanceKey>,
    mask: Option<Vec<bool>>,
}

impl StreamEnabler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Only consider the schemas whose flag is set.
    pub fn with_mask(mask: Vec<bool>) -> Self {
        StreamEnabler {
            seen: FxHashSet::default(),
            mask: Some(mask),
        }
    }

    fn active(&self, s: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m[s])
    }

    pub fn is_enabled(&self, key: &InstanceKey) -> bool {
        self.seen.contains(key)
    }

    /// Every instance enabled by `index` that has not been reported yet.
    pub fn all<C>(
        &mut self,
        streams: &[StreamSchema<C>],
        index: &AtomIndex,
        objects: &[ObjectRef],
    ) -> Vec<InstanceKey> {
        let mut found = Vec::new();
        for (s, schema) in streams.iter().enumerate() {
            if !self.active(s) {
                continue;
            }
            join(&schema.inp, schema.inputs.len(), index, None, objects, &mut |b| {
                found.push(InstanceKey {
                    stream: s,
                    inputs: b.iter().copied().collect(),
                })
            });
        }
        self.finish(found)
    }

    /// Instances enabled after `new_atoms` (already inserted into `index`)
    /// and `new_objects` were added. Sorted by schema then input ids.
    pub fn update<C>(
        &mut self,
        streams: &[StreamSchema<C>],
        index: &AtomIndex,
        new_atoms: &[Atom],
        objects: &[ObjectRef],
        new_objects: &[ObjectRef],
    ) -> Vec<InstanceKey> {
        let mut found = Vec::new();
        for (s, schema) in streams.iter().enumerate() {
            if !self.active(s) {
                continue;
            }
            let n = schema.inputs.len();
            let mut push = |b: &[ObjectRef]| {
                found.push(InstanceKey {
                    stream: s,
                    inputs: b.iter().copied().collect(),
                })
            };
            let has_free = (0..n).any(|v| !schema.inp.iter().any(|p| p.vars().any(|u| u == v)));
            if has_free && !new_objects.is_empty() {
                join(&schema.inp, n, index, None, objects, &mut push);
                continue;
            }
            for (k, cond) in schema.inp.iter().enumerate() {
                for atom in new_atoms.iter().filter(|a| a.predicate == cond.predicate) {
                    join(&schema.inp, n, index, Some((k, atom)), objects, &mut push);
                }
            }
        }
        self.finish(found)
    }

    fn finish(&mut self, mut found: Vec<InstanceKey>) -> Vec<InstanceKey> {
        found.sort();
        found.dedup();
        found.retain(|k| self.seen.insert(k.clone()));
        found
    }
}
