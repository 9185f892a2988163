use rustc_hash::FxHashMap;

use super::object::ObjectRef;
use super::predicate::{Args, Atom, PredicateId};
use super::schema::{AtomPattern, Term};

/// Insertion-ordered atom set indexed by predicate and by argument value.
#[derive(Clone, Debug, Default)]
pub struct AtomIndex {
    atoms: Vec<Atom>,
    ids: FxHashMap<Atom, u32>,
    by_pred: FxHashMap<PredicateId, Vec<u32>>,
    by_arg: FxHashMap<(PredicateId, u32, ObjectRef), Vec<u32>>,
}

const EMPTY: &[u32] = &[];

impl AtomIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut idx = Self::new();
        for a in atoms {
            idx.insert(a.clone());
        }
        idx
    }

    /// Returns true if the atom was new.
    pub fn insert(&mut self, atom: Atom) -> bool {
        if self.ids.contains_key(&atom) {
            return false;
        }
        let id = self.atoms.len() as u32;
        self.by_pred.entry(atom.predicate).or_default().push(id);
        for (pos, &o) in atom.args.iter().enumerate() {
            self.by_arg
                .entry((atom.predicate, pos as u32, o))
                .or_default()
                .push(id);
        }
        self.ids.insert(atom.clone(), id);
        self.atoms.push(atom);
        true
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.ids.contains_key(atom)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn with_predicate(&self, p: PredicateId) -> impl Iterator<Item = &Atom> {
        self.by_pred
            .get(&p)
            .map(Vec::as_slice)
            .unwrap_or(EMPTY)
            .iter()
            .map(move |&i| &self.atoms[i as usize])
    }

    fn candidates(&self, pattern: &AtomPattern, binding: &[Option<ObjectRef>]) -> &[u32] {
        let ground: Option<Args> = pattern
            .args
            .iter()
            .map(|t| match *t {
                Term::Obj(o) => Some(o),
                Term::Var(v) => binding[v],
            })
            .collect();
        if let Some(args) = ground {
            let atom = Atom {
                predicate: pattern.predicate,
                args,
            };
            return self.ids.get(&atom).map(std::slice::from_ref).unwrap_or(EMPTY);
        }
        let mut best: &[u32] = self
            .by_pred
            .get(&pattern.predicate)
            .map(Vec::as_slice)
            .unwrap_or(EMPTY);
        for (pos, t) in pattern.args.iter().enumerate() {
            let bound = match *t {
                Term::Obj(o) => Some(o),
                Term::Var(v) => binding[v],
            };
            if let Some(o) = bound {
                let list = self
                    .by_arg
                    .get(&(pattern.predicate, pos as u32, o))
                    .map(Vec::as_slice)
                    .unwrap_or(EMPTY);
                if list.len() < best.len() {
                    best = list;
                }
                if best.is_empty() {
                    break;
                }
            }
        }
        best
    }
}

/// Enumerates every binding of `n_vars` variables under which all `conds`
/// are in `index`.
///
/// With `seed = Some((k, atom))` only bindings that map condition `k` to
/// `atom` are produced. Variables that occur in no condition range over
/// `free_domain`. Bindings are reported in a deterministic order.
pub fn join(
    conds: &[AtomPattern],
    n_vars: usize,
    index: &AtomIndex,
    seed: Option<(usize, &Atom)>,
    free_domain: &[ObjectRef],
    out: &mut dyn FnMut(&[ObjectRef]),
) {
    let mut binding = vec![None; n_vars];
    let mut used = vec![false; conds.len()];
    if let Some((k, atom)) = seed {
        if !unify(&conds[k], atom, &mut binding, &mut Vec::new()) {
            return;
        }
        used[k] = true;
    }
    let mut ctx = JoinCtx {
        conds,
        index,
        free_domain,
        binding,
        used,
        out,
        scratch: Vec::new(),
    };
    let remaining = conds.len() - usize::from(seed.is_some());
    ctx.solve(remaining);
}

struct JoinCtx<'a, 'o> {
    conds: &'a [AtomPattern],
    index: &'a AtomIndex,
    free_domain: &'a [ObjectRef],
    binding: Vec<Option<ObjectRef>>,
    used: Vec<bool>,
    out: &'o mut dyn FnMut(&[ObjectRef]),
    scratch: Vec<ObjectRef>,
}

impl JoinCtx<'_, '_> {
    fn solve(&mut self, remaining: usize) {
        if remaining == 0 {
            self.enumerate_free(0);
            return;
        }
        let mut pick = None;
        let mut pick_len = usize::MAX;
        for (k, c) in self.conds.iter().enumerate() {
            if self.used[k] {
                continue;
            }
            let n = self.index.candidates(c, &self.binding).len();
            if n < pick_len {
                pick = Some(k);
                pick_len = n;
                if n == 0 {
                    return;
                }
            }
        }
        let k = pick.expect("an unused condition remains");
        let index = self.index;
        let cands = index.candidates(&self.conds[k], &self.binding);
        self.used[k] = true;
        let mut newly = Vec::new();
        for &id in cands {
            let atom = &index.atoms[id as usize];
            newly.clear();
            if unify(&self.conds[k], atom, &mut self.binding, &mut newly) {
                self.solve(remaining - 1);
            }
            for &v in &newly {
                self.binding[v] = None;
            }
        }
        self.used[k] = false;
    }

    fn enumerate_free(&mut self, from: usize) {
        match (from..self.binding.len()).find(|&v| self.binding[v].is_none()) {
            None => {
                self.scratch.clear();
                self.scratch
                    .extend(self.binding.iter().map(|b| b.expect("all variables bound")));
                (self.out)(&self.scratch);
            }
            Some(v) => {
                for i in 0..self.free_domain.len() {
                    self.binding[v] = Some(self.free_domain[i]);
                    self.enumerate_free(v + 1);
                }
                self.binding[v] = None;
            }
        }
    }
}

/// Extends `binding` so that `pattern` grounds to `atom`. Newly bound
/// variables are pushed to `newly`; on failure the binding is restored.
fn unify(
    pattern: &AtomPattern,
    atom: &Atom,
    binding: &mut [Option<ObjectRef>],
    newly: &mut Vec<usize>,
) -> bool {
    if pattern.predicate != atom.predicate || pattern.args.len() != atom.args.len() {
        return false;
    }
    let start = newly.len();
    for (t, &o) in pattern.args.iter().zip(atom.args.iter()) {
        let ok = match *t {
            Term::Obj(c) => c == o,
            Term::Var(v) => match binding[v] {
                Some(b) => b == o,
                None => {
                    binding[v] = Some(o);
                    newly.push(v);
                    true
                }
            },
        };
        if !ok {
            for &v in &newly[start..] {
                binding[v] = None;
            }
            newly.truncate(start);
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjectRegistry, Payload, PredicateKind, PredicateTable};

    fn setup() -> (PredicateTable, ObjectRegistry, PredicateId, Vec<ObjectRef>) {
        let mut t = PredicateTable::new();
        let edge = t.declare("Edge", 2, PredicateKind::Static).unwrap();
        let mut reg = ObjectRegistry::new();
        let objs = (0..4).map(|i| reg.intern(Payload::Int(i))).collect();
        (t, reg, edge, objs)
    }

    fn collect(
        conds: &[AtomPattern],
        n: usize,
        idx: &AtomIndex,
        seed: Option<(usize, &Atom)>,
        dom: &[ObjectRef],
    ) -> Vec<Vec<ObjectRef>> {
        let mut out = Vec::new();
        join(conds, n, idx, seed, dom, &mut |b| out.push(b.to_vec()));
        out.sort();
        out
    }

    #[test]
    fn two_hop_paths() {
        let (_, _, edge, o) = setup();
        let idx = AtomIndex::from_atoms(&[
            Atom::new(edge, [o[0], o[1]]),
            Atom::new(edge, [o[1], o[2]]),
            Atom::new(edge, [o[1], o[3]]),
        ]);
        let conds = vec![
            AtomPattern { predicate: edge, args: vec![Term::Var(0), Term::Var(1)] },
            AtomPattern { predicate: edge, args: vec![Term::Var(1), Term::Var(2)] },
        ];
        let got = collect(&conds, 3, &idx, None, &[]);
        assert_eq!(got, vec![vec![o[0], o[1], o[2]], vec![o[0], o[1], o[3]]]);
        let seed = Atom::new(edge, [o[1], o[3]]);
        let got = collect(&conds, 3, &idx, Some((1, &seed)), &[]);
        assert_eq!(got, vec![vec![o[0], o[1], o[3]]]);
    }

    #[test]
    fn repeated_variable_and_constants() {
        let (_, _, edge, o) = setup();
        let idx = AtomIndex::from_atoms(&[Atom::new(edge, [o[0], o[0]]), Atom::new(edge, [o[0], o[1]])]);
        let loops = vec![AtomPattern { predicate: edge, args: vec![Term::Var(0), Term::Var(0)] }];
        assert_eq!(collect(&loops, 1, &idx, None, &[]), vec![vec![o[0]]]);
        let to1 = vec![AtomPattern { predicate: edge, args: vec![Term::Var(0), Term::Obj(o[1])] }];
        assert_eq!(collect(&to1, 1, &idx, None, &[]), vec![vec![o[0]]]);
    }

    #[test]
    fn free_variables_range_over_domain() {
        let (_, _, edge, o) = setup();
        let idx = AtomIndex::from_atoms(&[Atom::new(edge, [o[0], o[1]])]);
        let conds = vec![AtomPattern { predicate: edge, args: vec![Term::Var(0), Term::Var(1)] }];
        let got = collect(&conds, 3, &idx, None, &o[2..]);
        assert_eq!(got, vec![vec![o[0], o[1], o[2]], vec![o[0], o[1], o[3]]]);
        assert_eq!(collect(&[], 1, &idx, None, &o).len(), 4);
    }
}
