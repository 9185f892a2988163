//! Focused solver: plan with placeholder objects and stream operators, then
//! draw only from the stream instances the candidate plan uses.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::model::{
    Args, Atom, AtomIndex, Draw, InstanceId, InstanceKey, InstancePool, LiteralPattern, ObjectRef,
    ObjectRegistry, OperatorSchema, PredicateId, PredicateKind, PredicateTable, ProblemInstance,
    StreamEnabler, StreamSchema, Term,
};
use crate::solve::{Budget, Clock, DrawRecord, IterationTrace, RunStats, SolveReport, Status, TraceStep};
use crate::splan::{s_plan, GroundingInput, GroundingMode, Plan, PlanStep, SPlanOutcome, SearchConfig};
use crate::{Cost, Error, Result};

pub const CONCRETE: &str = "Concrete";
/// Nullary fluent that holds until the first ordinary operator is applied.
pub const STREAM_PHASE: &str = "StreamPhase";

#[derive(Clone, Debug)]
pub struct FocusedConfig {
    /// Number of placeholder objects available to each planner call. At least one.
    pub theta: usize,
    /// Draws of the first `eager_commits` iterations go straight into the committed sets.
    pub eager_commits: usize,
    pub search: SearchConfig,
    pub budget: Budget,
    pub check_certificates: bool,
    /// Record every candidate plan and the blocked sets in the report.
    pub record_trace: bool,
}

impl Default for FocusedConfig {
    fn default() -> Self {
        FocusedConfig {
            theta: 5,
            eager_commits: 0,
            search: SearchConfig::default(),
            budget: Budget::default(),
            check_certificates: true,
            record_trace: false,
        }
    }
}

/// Adds `Concrete(x)` preconditions for every parameter.
pub fn tform_ops<C: Cost>(ops: &[OperatorSchema<C>], concrete: PredicateId) -> Vec<OperatorSchema<C>> {
    ops.iter()
        .map(|op| {
            let mut op = op.clone();
            for v in 0..op.params.len() {
                op.pre.push(concrete_literal(concrete, v));
            }
            op
        })
        .collect()
}

fn concrete_literal(concrete: PredicateId, v: usize) -> LiteralPattern {
    LiteralPattern {
        atom: crate::model::AtomPattern {
            predicate: concrete,
            args: vec![Term::Var(v)],
        },
        positive: true,
    }
}

/// Operator that stands for one draw from a stream.
#[derive(Clone, Debug)]
pub struct StreamOperator<C> {
    pub stream: usize,
    pub operator: OperatorSchema<C>,
    /// Static predicate marking blocked input tuples.
    pub blocked: PredicateId,
}

/// One operator per stream: parameters are inputs then outputs,
/// preconditions are the input conditions, `Concrete` inputs and an
/// unblocked input tuple; effects certify the outputs and make them concrete.
pub fn tform_streams<C: Cost>(
    streams: &[StreamSchema<C>],
    predicates: &mut PredicateTable,
    concrete: PredicateId,
) -> Result<Vec<StreamOperator<C>>> {
    let mut out = Vec::with_capacity(streams.len());
    for (s, schema) in streams.iter().enumerate() {
        let m = schema.inputs.len();
        let blocked = predicates.declare(&format!("Blocked-{}", schema.name), m, PredicateKind::Static)?;
        let mut pre: Vec<LiteralPattern> = (0..m).map(|v| concrete_literal(concrete, v)).collect();
        pre.push(LiteralPattern {
            atom: crate::model::AtomPattern {
                predicate: blocked,
                args: (0..m).map(Term::Var).collect(),
            },
            positive: false,
        });
        let mut eff: Vec<LiteralPattern> = schema
            .out
            .iter()
            .map(|p| LiteralPattern {
                atom: p.clone(),
                positive: true,
            })
            .collect();
        eff.extend((m..schema.n_vars()).map(|v| concrete_literal(concrete, v)));
        out.push(StreamOperator {
            stream: s,
            operator: OperatorSchema {
                name: schema.name.clone(),
                params: schema.inputs.iter().chain(&schema.outputs).cloned().collect(),
                stat: schema.inp.clone(),
                pre,
                eff,
                cost: schema.meta_cost,
            },
            blocked,
        });
    }
    Ok(out)
}

/// Write-once map from placeholder objects to drawn objects.
#[derive(Clone, Debug, Default)]
pub struct BindingEnv {
    map: FxHashMap<ObjectRef, ObjectRef>,
}

impl BindingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `abstract_object ↦ object` unless already bound. Returns true if recorded.
    pub fn bind(&mut self, abstract_object: ObjectRef, object: ObjectRef) -> bool {
        if self.map.contains_key(&abstract_object) {
            return false;
        }
        self.map.insert(abstract_object, object);
        true
    }

    pub fn get(&self, abstract_object: ObjectRef) -> Option<ObjectRef> {
        self.map.get(&abstract_object).copied()
    }
}

/// Substitutes bound placeholders; `None` if some placeholder is unbound.
pub fn apply_bindings(bd: &BindingEnv, xs: &[ObjectRef], registry: &ObjectRegistry) -> Option<Args> {
    xs.iter()
        .map(|&x| if registry.is_abstract(x) { bd.get(x) } else { Some(x) })
        .collect()
}

struct Focused<'p, C> {
    problem: &'p ProblemInstance<C>,
    config: &'p FocusedConfig,
    predicates: PredicateTable,
    operators: Vec<OperatorSchema<C>>,
    stream_ops: Vec<StreamOperator<C>>,
    restricted: Vec<bool>,
    concrete: PredicateId,
    phase: PredicateId,
    registry: ObjectRegistry,
    abstract_objects: Vec<ObjectRef>,
    objects: Vec<ObjectRef>,
    object_set: FxHashSet<ObjectRef>,
    atoms: AtomIndex,
    objects_t: Vec<ObjectRef>,
    object_t_set: FxHashSet<ObjectRef>,
    atoms_t: AtomIndex,
    beta_t: Vec<InstanceKey>,
    beta_t_set: FxHashSet<InstanceKey>,
    beta_p: Vec<InstanceKey>,
    beta_p_set: FxHashSet<InstanceKey>,
    pool: InstancePool,
    eager: StreamEnabler,
    eager_seen: Option<(usize, usize)>,
    stats: RunStats,
    draws: Vec<DrawRecord>,
    trace: Vec<IterationTrace>,
}

impl<'p, C: Cost> Focused<'p, C> {
    fn new(problem: &'p ProblemInstance<C>, config: &'p FocusedConfig) -> Result<Self> {
        problem.validate()?;
        if config.theta == 0 {
            return Err(Error::InvalidConfig("theta must be at least 1".into()));
        }
        let mut predicates = problem.predicates.clone();
        for reserved in [CONCRETE, STREAM_PHASE] {
            if predicates.lookup(reserved).is_some() {
                return Err(Error::InvalidSchema {
                    schema: reserved.into(),
                    reason: "predicate name is reserved".into(),
                });
            }
        }
        let concrete = predicates.declare(CONCRETE, 1, PredicateKind::Fluent)?;
        let phase = predicates.declare(STREAM_PHASE, 0, PredicateKind::Fluent)?;
        let phase_atom = crate::model::AtomPattern {
            predicate: phase,
            args: Vec::new(),
        };
        // Stream operators only depend on facts that ordinary operators never
        // add, so every plan can be reordered to draw first. Search only
        // considers such plans.
        let mut operators = tform_ops(&problem.operators, concrete);
        for op in &mut operators {
            op.eff.push(LiteralPattern {
                atom: phase_atom.clone(),
                positive: false,
            });
        }
        let stream_ops = tform_streams(&problem.streams, &mut predicates, concrete)?;
        let mut restricted = vec![false; operators.len()];
        for so in &stream_ops {
            let mut op = so.operator.clone();
            op.pre.push(LiteralPattern {
                atom: phase_atom.clone(),
                positive: true,
            });
            operators.push(op);
            restricted.push(true);
        }
        let mut registry = problem.registry.clone();
        let abstract_objects = (1..=config.theta as u32).map(|i| registry.abstract_object(i)).collect();
        let mut f = Focused {
            problem,
            config,
            predicates,
            operators,
            stream_ops,
            restricted,
            concrete,
            phase,
            registry,
            abstract_objects,
            objects: Vec::new(),
            object_set: FxHashSet::default(),
            atoms: AtomIndex::from_atoms(&problem.init),
            objects_t: Vec::new(),
            object_t_set: FxHashSet::default(),
            atoms_t: AtomIndex::new(),
            beta_t: Vec::new(),
            beta_t_set: FxHashSet::default(),
            beta_p: Vec::new(),
            beta_p_set: FxHashSet::default(),
            pool: InstancePool::new(),
            eager: StreamEnabler::with_mask(problem.streams.iter().map(|s| s.eager).collect()),
            eager_seen: None,
            stats: RunStats::default(),
            draws: Vec::new(),
            trace: Vec::new(),
        };
        for &o in &problem.objects {
            f.commit_object(o);
        }
        Ok(f)
    }

    fn commit_object(&mut self, o: ObjectRef) -> bool {
        if self.object_set.insert(o) {
            self.objects.push(o);
            true
        } else {
            false
        }
    }

    fn block_permanently(&mut self, key: InstanceKey) {
        if self.beta_p_set.insert(key.clone()) {
            self.beta_p.push(key);
        }
    }

    fn draw(&mut self, id: InstanceId) -> Result<Draw> {
        let key = self.pool.get(id).key.clone();
        let schema = &self.problem.streams[key.stream];
        let inst = self.pool.get_mut(id);
        let before = inst.calls;
        let draw = inst.next_tuple(schema, &mut self.registry, self.config.check_certificates)?;
        let invoked = inst.calls - before;
        self.stats.calls += invoked;
        if schema.is_test() {
            self.stats.test_calls += invoked;
        }
        if invoked > 0 {
            self.draws.push(DrawRecord {
                stream: key.stream,
                inputs: key.inputs,
                produced: matches!(draw, Draw::Tuple { .. }),
            });
        }
        Ok(draw)
    }

    /// Evaluates eager tests enabled by the committed atoms, committing their results.
    fn run_eager(&mut self, clock: &Clock) -> Result<bool> {
        let streams = &self.problem.streams;
        let mut keys = match self.eager_seen {
            None => self.eager.all(streams, &self.atoms, &self.objects),
            Some((n_atoms, n_objects)) => {
                let new_atoms = self.atoms.atoms()[n_atoms..].to_vec();
                self.eager
                    .update(streams, &self.atoms, &new_atoms, &self.objects, &self.objects[n_objects..])
            }
        };
        while !keys.is_empty() {
            let mut new_atoms = Vec::new();
            for key in keys {
                if !clock.may_draw(&self.stats) {
                    return Ok(false);
                }
                let (id, _) = self.pool.get_or_insert(key.clone());
                if let Draw::Tuple { certified, .. } = self.draw(id)? {
                    for a in certified {
                        if self.atoms.insert(a.clone()) {
                            new_atoms.push(a);
                        }
                    }
                }
                self.block_permanently(key);
            }
            keys = self.eager.update(streams, &self.atoms, &new_atoms, &self.objects, &[]);
        }
        self.eager_seen = Some((self.atoms.len(), self.objects.len()));
        Ok(true)
    }

    /// Plans with stream outputs restricted to placeholders first. Only when
    /// that fails may outputs also name concrete objects, which is needed to
    /// certify new facts about objects that already exist.
    fn plan(&mut self, clock: &Clock) -> Result<SPlanOutcome> {
        let mut init: Vec<Atom> = self.atoms.atoms().to_vec();
        for key in self.beta_t.iter().chain(&self.beta_p) {
            init.push(Atom::new(self.stream_ops[key.stream].blocked, key.inputs.iter().copied()));
        }
        init.extend(self.objects.iter().map(|&o| Atom::new(self.concrete, [o])));
        init.push(Atom::new(self.phase, []));
        let mut objects = self.objects.clone();
        objects.extend_from_slice(&self.abstract_objects);
        let p = self.problem;
        let search = clock.search_config(&self.config.search);
        for outputs in [&self.abstract_objects, &objects] {
            let input = GroundingInput {
                predicates: &self.predicates,
                operators: &self.operators,
                axioms: &p.axioms,
                objects: &objects,
                init: &init,
                goal: &p.goal,
                mode: GroundingMode::Focused,
                restricted: Some((&self.restricted, outputs)),
                ordered: Some((self.concrete, &self.abstract_objects)),
            };
            self.stats.iterations += 1;
            let r = s_plan(&input, &search)?;
            self.stats.expanded += r.stats.expanded;
            if !matches!(r.outcome, SPlanOutcome::Infeasible) {
                return Ok(r.outcome);
            }
        }
        Ok(SPlanOutcome::Infeasible)
    }

    /// Draws once from each stream operator of `plan` whose inputs are concrete after binding.
    fn add_objects(&mut self, plan: &Plan, commit: bool, clock: &Clock) -> Result<bool> {
        let n_ops = self.problem.operators.len();
        let mut bd = BindingEnv::new();
        for step in &plan.steps {
            if step.operator < n_ops {
                continue;
            }
            let stream = self.stream_ops[step.operator - n_ops].stream;
            let m = self.problem.streams[stream].inputs.len();
            let Some(inputs) = apply_bindings(&bd, &step.args[..m], &self.registry) else {
                continue;
            };
            // A placeholder reused across streams may be bound to an object
            // that does not satisfy this stream's input conditions.
            let schema = &self.problem.streams[stream];
            let known = |a: &Atom| self.atoms.contains(a) || self.atoms_t.contains(a);
            if !schema.input_atoms(&inputs).iter().all(known) {
                continue;
            }
            if !clock.may_draw(&self.stats) {
                return Ok(false);
            }
            let key = InstanceKey { stream, inputs };
            let (id, _) = self.pool.get_or_insert(key.clone());
            match self.draw(id)? {
                Draw::Tuple { outputs, certified } => {
                    for (&y, &o) in step.args[m..].iter().zip(&outputs) {
                        if self.registry.is_abstract(y) {
                            bd.bind(y, o);
                        }
                    }
                    if commit {
                        for o in outputs {
                            self.commit_object(o);
                        }
                        for a in certified {
                            self.atoms.insert(a);
                        }
                    } else {
                        for o in outputs {
                            if !self.object_set.contains(&o) && self.object_t_set.insert(o) {
                                self.objects_t.push(o);
                            }
                        }
                        for a in certified {
                            if !self.atoms.contains(&a) {
                                self.atoms_t.insert(a);
                            }
                        }
                    }
                    if self.beta_t_set.insert(key.clone()) {
                        self.beta_t.push(key);
                    }
                }
                Draw::Exhausted => self.block_permanently(key),
            }
        }
        Ok(true)
    }

    fn reset(&mut self) {
        for o in std::mem::take(&mut self.objects_t) {
            self.commit_object(o);
        }
        self.object_t_set.clear();
        let withheld = std::mem::take(&mut self.atoms_t);
        for a in withheld.atoms() {
            self.atoms.insert(a.clone());
        }
        self.beta_t.clear();
        self.beta_t_set.clear();
        self.stats.resets += 1;
    }

    fn record(&mut self, plan: Option<&Plan>, reset: bool) {
        if !self.config.record_trace {
            return;
        }
        let n_ops = self.problem.operators.len();
        let plan = plan.map(|p| {
            p.steps
                .iter()
                .map(|s| TraceStep {
                    name: self.operators[s.operator].name.clone(),
                    stream: (s.operator >= n_ops).then(|| self.stream_ops[s.operator - n_ops].stream),
                    args: s.args.clone(),
                })
                .collect()
        });
        self.trace.push(IterationTrace {
            plan,
            reset,
            temporarily_blocked: self.beta_t.clone(),
            permanently_blocked: self.beta_p.clone(),
        });
    }

    fn into_report(self, status: Status, clock: &Clock) -> SolveReport {
        let mut stats = self.stats;
        stats.runtime = clock.elapsed();
        SolveReport {
            status,
            stats,
            registry: self.registry,
            objects: self.objects,
            certified: self.atoms.atoms().to_vec(),
            draws: self.draws,
            trace: self.trace,
            permanently_blocked: self.beta_p,
        }
    }
}

/// Runs the focused solver.
///
/// Returns `Solved` with a plan made of ordinary operators over concrete
/// objects, `Infeasible` when the planner fails with nothing withheld or
/// temporarily blocked, or `Timeout` when a budget runs out.
pub fn solve_focused<C: Cost>(problem: &ProblemInstance<C>, config: &FocusedConfig) -> Result<SolveReport> {
    let clock = Clock::new(&config.budget);
    let mut f = Focused::new(problem, config)?;
    let n_ops = problem.operators.len();
    loop {
        if !clock.may_plan(&f.stats) || !f.run_eager(&clock)? {
            return Ok(f.into_report(Status::Timeout, &clock));
        }
        let iteration = f.stats.iterations as usize;
        match f.plan(&clock)? {
            SPlanOutcome::Timeout => return Ok(f.into_report(Status::Timeout, &clock)),
            SPlanOutcome::Plan(plan) => {
                if plan.steps.iter().all(|s| s.operator < n_ops) {
                    f.record(Some(&plan), false);
                    let plan = Plan {
                        steps: plan
                            .steps
                            .into_iter()
                            .map(|s| PlanStep {
                                operator: s.operator,
                                args: s.args,
                            })
                            .collect(),
                    };
                    return Ok(f.into_report(Status::Solved(plan), &clock));
                }
                let commit = iteration < config.eager_commits;
                let finished = f.add_objects(&plan, commit, &clock)?;
                f.record(Some(&plan), false);
                if !finished {
                    return Ok(f.into_report(Status::Timeout, &clock));
                }
            }
            SPlanOutcome::Infeasible => {
                if f.objects_t.is_empty() && f.atoms_t.is_empty() && f.beta_t.is_empty() {
                    f.record(None, false);
                    return Ok(f.into_report(Status::Infeasible, &clock));
                }
                f.reset();
                f.record(None, true);
            }
        }
    }
}
