use rustc_hash::{FxHashMap, FxHashSet};

use crate::model::{
    check_goal, join, Args, Atom, AtomIndex, AtomPattern, AxiomSchema, Literal, ObjectRef,
    OperatorSchema, PredicateId, PredicateKind, PredicateTable,
};
use crate::{Cost, Error, Result};

pub type FactId = u32;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum GroundingMode {
    /// Operators may not touch static predicates.
    Plain,
    /// Operators may add static atoms (stream operators) and require negated
    /// static atoms (blocked instances).
    Focused,
}

/// Everything needed to ground a finite planning task.
pub struct GroundingInput<'a, C> {
    pub predicates: &'a PredicateTable,
    pub operators: &'a [OperatorSchema<C>],
    pub axioms: &'a [AxiomSchema],
    pub objects: &'a [ObjectRef],
    pub init: &'a [Atom],
    pub goal: &'a [Literal],
    pub mode: GroundingMode,
    /// Operators whose flag is set bind parameters that occur in no
    /// positive condition only to objects of the given domain.
    pub restricted: Option<(&'a [bool], &'a [ObjectRef])>,
    /// Symmetry breaking over an object chain: a flagged operator instance
    /// mentioning the `k`-th chain object (`k ≥ 1`) also requires this
    /// unary predicate on the `(k-1)`-th one, unless that one is mentioned too.
    pub ordered: Option<(PredicateId, &'a [ObjectRef])>,
}

impl<'a, C> GroundingInput<'a, C> {
    pub fn new(
        predicates: &'a PredicateTable,
        operators: &'a [OperatorSchema<C>],
        axioms: &'a [AxiomSchema],
        objects: &'a [ObjectRef],
        init: &'a [Atom],
        goal: &'a [Literal],
    ) -> Self {
        GroundingInput {
            predicates,
            operators,
            axioms,
            objects,
            init,
            goal,
            mode: GroundingMode::Plain,
            restricted: None,
            ordered: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundAction<C> {
    pub operator: usize,
    pub args: Args,
    pub pre_pos: Vec<FactId>,
    pub pre_neg: Vec<FactId>,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
    pub cost: C,
}

#[derive(Clone, Debug)]
pub struct GroundAxiom {
    pub axiom: usize,
    pub args: Args,
    pub body_pos: Vec<FactId>,
    pub body_neg: Vec<FactId>,
    pub head: FactId,
}

/// Sorted set of true non-derived facts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct State(Vec<FactId>);

impl State {
    pub fn new(mut facts: Vec<FactId>) -> Self {
        facts.sort_unstable();
        facts.dedup();
        State(facts)
    }

    pub fn facts(&self) -> &[FactId] {
        &self.0
    }

    pub fn contains(&self, f: FactId) -> bool {
        self.0.binary_search(&f).is_ok()
    }
}

/// Finite grounded task: facts, actions, axioms, initial state and goal.
#[derive(Clone, Debug)]
pub struct GroundTask<C> {
    facts: Vec<Atom>,
    fact_ids: FxHashMap<Atom, FactId>,
    derived: Vec<bool>,
    pub actions: Vec<GroundAction<C>>,
    pub axioms: Vec<GroundAxiom>,
    init: State,
    goal_pos: Vec<FactId>,
    goal_neg: Vec<FactId>,
    goal_unreachable: bool,
    pub(crate) axioms_by_body: Vec<Vec<u32>>,
}

impl<C: Cost> GroundTask<C> {
    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn fact(&self, f: FactId) -> &Atom {
        &self.facts[f as usize]
    }

    pub fn fact_id(&self, atom: &Atom) -> Option<FactId> {
        self.fact_ids.get(atom).copied()
    }

    pub fn is_derived(&self, f: FactId) -> bool {
        self.derived[f as usize]
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal_pos(&self) -> &[FactId] {
        &self.goal_pos
    }

    pub fn goal_neg(&self) -> &[FactId] {
        &self.goal_neg
    }

    /// True when some positive goal atom is not even relaxed-reachable.
    pub fn goal_unreachable(&self) -> bool {
        self.goal_unreachable
    }

    pub fn is_goal(&self, truth: &[bool]) -> bool {
        !self.goal_unreachable
            && self.goal_pos.iter().all(|&f| truth[f as usize])
            && self.goal_neg.iter().all(|&f| !truth[f as usize])
    }

    pub fn applicable(&self, a: &GroundAction<C>, truth: &[bool]) -> bool {
        a.pre_pos.iter().all(|&f| truth[f as usize]) && a.pre_neg.iter().all(|&f| !truth[f as usize])
    }

    /// Delete effects are applied before add effects.
    pub fn successor(&self, state: &State, a: &GroundAction<C>) -> State {
        let mut next: Vec<FactId> = state
            .0
            .iter()
            .copied()
            .filter(|f| !a.del.contains(f) || a.add.contains(f))
            .collect();
        next.extend(a.add.iter().copied());
        State::new(next)
    }
}

struct Prep<'a> {
    conds: Vec<AtomPattern>,
    n_vars: usize,
    neg_static: Vec<&'a AtomPattern>,
    produces: Vec<&'a AtomPattern>,
    restricted: bool,
    has_free: bool,
}

/// Grounds the task by a semi-naive relaxed-reachability fixpoint.
///
/// Only instances whose positive conditions are relaxed-reachable from the
/// initial state are produced. Static atoms of the initial state are compiled
/// away; static atoms outside it become ordinary facts that only operators
/// with static effects can achieve.
pub fn ground<C: Cost>(input: &GroundingInput<'_, C>) -> Result<GroundTask<C>> {
    let mut g = Grounder::new(input.predicates, input.operators, input.axioms, input.mode)?;
    if let Some((flags, domain)) = input.restricted {
        g.restrict(flags, domain);
    }
    if let Some((pred, chain)) = input.ordered {
        g.set_ordered(pred, chain);
    }
    g.extend(input.objects, input.init);
    g.task(input.goal)
}

/// Relaxed-reachability grounder that can be extended with more objects and
/// initial atoms without redoing earlier work.
///
/// Extending is sound as long as the initial state only grows and no static
/// atom that a negative precondition mentions is added later; instances
/// pruned by such atoms are filtered again when the task is built.
pub struct Grounder<'a, C> {
    predicates: &'a PredicateTable,
    operators: &'a [OperatorSchema<C>],
    axioms: &'a [AxiomSchema],
    preps: Vec<Prep<'a>>,
    restricted: Option<(Vec<bool>, Vec<ObjectRef>)>,
    ordered: Option<(PredicateId, Vec<ObjectRef>)>,
    objects: Vec<ObjectRef>,
    init: Vec<Atom>,
    init_set: FxHashSet<Atom>,
    reach: AtomIndex,
    seen: FxHashSet<(u32, Args)>,
    instances: Vec<(usize, Args)>,
    started: bool,
}

impl<'a, C: Cost> Grounder<'a, C> {
    pub fn new(
        predicates: &'a PredicateTable,
        operators: &'a [OperatorSchema<C>],
        axioms: &'a [AxiomSchema],
        mode: GroundingMode,
    ) -> Result<Self> {
        let preds = predicates;
        let is_static = |a: &AtomPattern| preds.kind(a.predicate) == PredicateKind::Static;
        for op in operators {
            for l in &op.eff {
                let kind = preds.kind(l.atom.predicate);
                let bad = match kind {
                    PredicateKind::Derived => Some("derived effect"),
                    PredicateKind::Static if !l.positive => Some("static delete effect"),
                    PredicateKind::Static if mode == GroundingMode::Plain => Some("static effect"),
                    _ => None,
                };
                if let Some(reason) = bad {
                    return Err(Error::InvalidSchema {
                        schema: op.name.clone(),
                        reason: reason.into(),
                    });
                }
            }
        }
        for ax in axioms {
            if ax
                .pre
                .iter()
                .any(|l| !l.positive && preds.kind(l.atom.predicate) == PredicateKind::Derived)
            {
                return Err(Error::InvalidSchema {
                    schema: ax.name.clone(),
                    reason: "negated derived predicate in axiom body".into(),
                });
            }
        }
        let neg_static = |pre: &'a [crate::model::LiteralPattern]| -> Vec<&'a AtomPattern> {
            pre.iter()
                .filter(|l| !l.positive && is_static(&l.atom))
                .map(|l| &l.atom)
                .collect()
        };
        let has_free = |conds: &[AtomPattern], n: usize| {
            let mut bound = vec![false; n];
            for c in conds {
                for v in c.vars() {
                    bound[v] = true;
                }
            }
            bound.contains(&false)
        };
        let mut preps = Vec::with_capacity(operators.len() + axioms.len());
        for op in operators {
            let conds = op.positive_conditions();
            preps.push(Prep {
                has_free: has_free(&conds, op.arity()),
                conds,
                n_vars: op.arity(),
                neg_static: neg_static(&op.pre),
                produces: op.adds().collect(),
                restricted: false,
            });
        }
        for ax in axioms {
            let conds = ax.positive_conditions();
            preps.push(Prep {
                has_free: has_free(&conds, ax.arity()),
                conds,
                n_vars: ax.arity(),
                neg_static: neg_static(&ax.pre),
                produces: vec![&ax.head],
                restricted: false,
            });
        }
        Ok(Grounder {
            predicates,
            operators,
            axioms,
            preps,
            restricted: None,
            ordered: None,
            objects: Vec::new(),
            init: Vec::new(),
            init_set: FxHashSet::default(),
            reach: AtomIndex::new(),
            seen: FxHashSet::default(),
            instances: Vec::new(),
            started: false,
        })
    }

    /// Flagged operators bind parameters that occur in no positive condition
    /// only to objects of `domain`. Must be called before the first extension.
    pub fn restrict(&mut self, flags: &[bool], domain: &[ObjectRef]) {
        for (p, &f) in self.preps.iter_mut().zip(flags) {
            p.restricted = f;
        }
        self.restricted = Some((flags.to_vec(), domain.to_vec()));
    }

    /// Symmetry breaking over `chain`: a flagged operator instance
    /// mentioning the `k`-th chain object (`k ≥ 1`) also requires `pred`
    /// on the `(k-1)`-th one, unless that one is mentioned too.
    pub fn set_ordered(&mut self, pred: PredicateId, chain: &[ObjectRef]) {
        self.ordered = Some((pred, chain.to_vec()));
    }

    /// Adds the objects and initial atoms not seen before and continues the fixpoint.
    ///
    /// `objects` and `init` are the complete current lists; whatever was
    /// passed before must be a prefix of them.
    pub fn extend(&mut self, objects: &[ObjectRef], init: &[Atom]) {
        let new_objects = objects.len() > self.objects.len();
        self.objects.extend_from_slice(&objects[self.objects.len()..]);
        let mut delta = Vec::new();
        for a in &init[self.init.len()..] {
            self.init_set.insert(a.clone());
            if self.reach.insert(a.clone()) {
                delta.push(a.clone());
            }
        }
        self.init.extend_from_slice(&init[self.init.len()..]);
        let mut full: Vec<bool> = self
            .preps
            .iter()
            .map(|p| !self.started || (new_objects && p.has_free && !p.restricted))
            .collect();
        self.started = true;
        let empty: &[ObjectRef] = &[];
        loop {
            let mut found: Vec<(usize, Args)> = Vec::new();
            for (si, prep) in self.preps.iter().enumerate() {
                let domain = if prep.restricted {
                    self.restricted.as_ref().map_or(empty, |(_, d)| d.as_slice())
                } else {
                    &self.objects
                };
                let mut push = |b: &[ObjectRef]| found.push((si, b.iter().copied().collect()));
                if full[si] {
                    join(&prep.conds, prep.n_vars, &self.reach, None, domain, &mut push);
                    continue;
                }
                for (k, c) in prep.conds.iter().enumerate() {
                    for a in delta.iter().filter(|a| a.predicate == c.predicate) {
                        join(&prep.conds, prep.n_vars, &self.reach, Some((k, a)), domain, &mut push);
                    }
                }
            }
            full.iter_mut().for_each(|f| *f = false);
            let mut next = Vec::new();
            for (si, b) in found {
                if !self.seen.insert((si as u32, b.clone())) {
                    continue;
                }
                let prep = &self.preps[si];
                if prep.neg_static.iter().any(|p| self.init_set.contains(&p.ground(&b))) {
                    continue;
                }
                for p in &prep.produces {
                    let atom = p.ground(&b);
                    if self.reach.insert(atom.clone()) {
                        next.push(atom);
                    }
                }
                self.instances.push((si, b));
            }
            if next.is_empty() {
                break;
            }
            delta = next;
        }
    }

    /// Builds the finite task for the current objects and initial state.
    pub fn task(&self, goal: &[Literal]) -> Result<GroundTask<C>> {
        let preds = self.predicates;
        check_goal(preds, goal)?;
        let init_set = &self.init_set;
        let mut facts = Vec::new();
        let mut fact_ids = FxHashMap::default();
        let mut derived = Vec::new();
        for a in self.reach.atoms() {
            let kind = preds.kind(a.predicate);
            if kind == PredicateKind::Static && init_set.contains(a) {
                continue;
            }
            fact_ids.insert(a.clone(), facts.len() as FactId);
            facts.push(a.clone());
            derived.push(kind == PredicateKind::Derived);
        }
        let compiled = |a: &Atom| preds.kind(a.predicate) == PredicateKind::Static && init_set.contains(a);
        let id = |a: &Atom| -> Result<FactId> {
            fact_ids
                .get(a)
                .copied()
                .ok_or_else(|| Error::InternalFault("reachable atom without fact id".into()))
        };

        // Nothing to search for when a goal atom is not even relaxed-reachable.
        let hopeless = goal
            .iter()
            .any(|l| if l.positive { !self.reach.contains(&l.atom) } else { compiled(&l.atom) });
        let instances: &[(usize, Args)] = if hopeless { &[] } else { &self.instances };

        let n_ops = self.operators.len();
        let mut actions = Vec::new();
        let mut axioms = Vec::new();
        for (si, b) in instances {
            let (si, b) = (*si, b.clone());
            let prep = &self.preps[si];
            if prep.neg_static.iter().any(|p| init_set.contains(&p.ground(&b))) {
                continue;
            }
            let (stat, pre) = if si < n_ops {
                (&self.operators[si].stat, &self.operators[si].pre)
            } else {
                let ax = &self.axioms[si - n_ops];
                (&ax.stat, &ax.pre)
            };
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for p in stat.iter().chain(pre.iter().filter(|l| l.positive).map(|l| &l.atom)) {
                let a = p.ground(&b);
                if !compiled(&a) {
                    pos.push(id(&a)?);
                }
            }
            for l in pre.iter().filter(|l| !l.positive) {
                if let Some(&f) = fact_ids.get(&l.atom.ground(&b)) {
                    neg.push(f);
                }
            }
            if let (Some((pred, chain)), Some((flags, _))) = (&self.ordered, &self.restricted) {
                if si < n_ops && flags[si] {
                    let mut reachable = true;
                    for w in chain.windows(2) {
                        if b.contains(&w[1]) && !b.contains(&w[0]) {
                            match fact_ids.get(&Atom::new(*pred, [w[0]])) {
                                Some(&f) => pos.push(f),
                                None => reachable = false,
                            }
                        }
                    }
                    if !reachable {
                        continue;
                    }
                }
            }
            pos.sort_unstable();
            pos.dedup();
            neg.sort_unstable();
            neg.dedup();
            if si < n_ops {
                let op = &self.operators[si];
                let mut add = op
                    .adds()
                    .map(|p| p.ground(&b))
                    .filter(|a| !compiled(a))
                    .map(|a| id(&a))
                    .collect::<Result<Vec<_>>>()?;
                let mut del: Vec<FactId> =
                    op.dels().filter_map(|p| fact_ids.get(&p.ground(&b)).copied()).collect();
                add.sort_unstable();
                add.dedup();
                del.sort_unstable();
                del.dedup();
                actions.push(GroundAction {
                    operator: si,
                    args: b,
                    pre_pos: pos,
                    pre_neg: neg,
                    add,
                    del,
                    cost: op.cost,
                });
            } else {
                let head = id(&self.preps[si].produces[0].ground(&b))?;
                axioms.push(GroundAxiom {
                    axiom: si - n_ops,
                    args: b,
                    body_pos: pos,
                    body_neg: neg,
                    head,
                });
            }
        }

        let init = State::new(
            self.init
                .iter()
                .filter(|a| !compiled(a))
                .filter_map(|a| fact_ids.get(a).copied())
                .collect(),
        );

        let mut goal_pos = Vec::new();
        let mut goal_neg = Vec::new();
        let mut goal_unreachable = hopeless;
        for l in goal {
            if compiled(&l.atom) {
                goal_unreachable |= !l.positive;
                continue;
            }
            match (fact_ids.get(&l.atom), l.positive) {
                (Some(&f), true) => goal_pos.push(f),
                (Some(&f), false) => goal_neg.push(f),
                (None, true) => goal_unreachable = true,
                (None, false) => {}
            }
        }

        let mut axioms_by_body = vec![Vec::new(); facts.len()];
        for (i, ax) in axioms.iter().enumerate() {
            for &f in &ax.body_pos {
                axioms_by_body[f as usize].push(i as u32);
            }
        }

        Ok(GroundTask {
            facts,
            fact_ids,
            derived,
            actions,
            axioms,
            init,
            goal_pos,
            goal_neg,
            goal_unreachable,
            axioms_by_body,
        })
    }
}
