//! Incremental solver: plan over the current objects, and while that fails,
//! draw from stream instances in first-in first-out order.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;

use crate::model::{
    Atom, AtomIndex, Draw, InstanceId, InstanceKey, InstancePool, ObjectRef, ObjectRegistry,
    ProblemInstance, StreamEnabler,
};
use crate::solve::{Budget, Clock, DrawRecord, RunStats, SolveReport, Status};
use crate::splan::{solve_task, Grounder, GroundingMode, SPlanOutcome, SearchConfig};
use crate::{Cost, Error, Result};

#[derive(Clone, Debug)]
pub struct IncrementalConfig {
    /// Draws between consecutive planner calls. At least one.
    pub k: usize,
    pub search: SearchConfig,
    pub budget: Budget,
    /// Run stream certificate checkers on every drawn tuple.
    pub check_certificates: bool,
}

impl Default for IncrementalConfig {
    fn default() -> Self {
        IncrementalConfig {
            k: 1,
            search: SearchConfig::default(),
            budget: Budget::default(),
            check_certificates: true,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DrawStep {
    /// The instance produced a tuple.
    Produced,
    /// The instance is exhausted and will not be revisited.
    Exhausted,
}

/// Objects, certified atoms and the stream instance queue.
pub struct IncrementalState<'p, C> {
    problem: &'p ProblemInstance<C>,
    check: bool,
    pub registry: ObjectRegistry,
    objects: Vec<ObjectRef>,
    object_set: FxHashSet<ObjectRef>,
    atoms: AtomIndex,
    queue: VecDeque<InstanceId>,
    pool: InstancePool,
    enabler: StreamEnabler,
    grounder: Grounder<'p, C>,
    pub stats: RunStats,
    pub draws: Vec<DrawRecord>,
}

impl<'p, C: Cost> IncrementalState<'p, C> {
    /// Enqueues every instance enabled by the initial state, evaluating eager tests on the spot.
    pub fn new(problem: &'p ProblemInstance<C>, check_certificates: bool) -> Result<Self> {
        problem.validate()?;
        let mut s = IncrementalState {
            problem,
            check: check_certificates,
            registry: problem.registry.clone(),
            objects: Vec::new(),
            object_set: FxHashSet::default(),
            atoms: AtomIndex::from_atoms(&problem.init),
            queue: VecDeque::new(),
            pool: InstancePool::new(),
            enabler: StreamEnabler::new(),
            grounder: Grounder::new(&problem.predicates, &problem.operators, &problem.axioms, GroundingMode::Plain)?,
            stats: RunStats::default(),
            draws: Vec::new(),
        };
        for &o in &problem.objects {
            s.add_object(o);
        }
        let keys = s.enabler.all(&problem.streams, &s.atoms, &s.objects);
        s.absorb(keys)?;
        Ok(s)
    }

    pub fn objects(&self) -> &[ObjectRef] {
        &self.objects
    }

    pub fn atoms(&self) -> &AtomIndex {
        &self.atoms
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Keys of the queued instances, front first.
    pub fn queued(&self) -> Vec<InstanceKey> {
        self.queue.iter().map(|&id| self.pool.get(id).key.clone()).collect()
    }

    fn add_object(&mut self, o: ObjectRef) -> bool {
        if self.object_set.insert(o) {
            self.objects.push(o);
            true
        } else {
            false
        }
    }

    fn draw(&mut self, id: InstanceId, new_objects: &mut Vec<ObjectRef>, new_atoms: &mut Vec<Atom>) -> Result<bool> {
        let schema = &self.problem.streams[self.pool.get(id).key.stream];
        let inst = self.pool.get_mut(id);
        let before = inst.calls;
        let draw = inst.next_tuple(schema, &mut self.registry, self.check)?;
        let invoked = inst.calls - before;
        self.stats.calls += invoked;
        if schema.is_test() {
            self.stats.test_calls += invoked;
        }
        let produced = matches!(draw, Draw::Tuple { .. });
        if invoked > 0 {
            let key = &self.pool.get(id).key;
            self.draws.push(DrawRecord {
                stream: key.stream,
                inputs: key.inputs.clone(),
                produced,
            });
        }
        if let Draw::Tuple { outputs, certified } = draw {
            for o in outputs {
                if self.add_object(o) {
                    new_objects.push(o);
                }
            }
            for a in certified {
                if self.atoms.insert(a.clone()) {
                    new_atoms.push(a);
                }
            }
        }
        Ok(produced)
    }

    /// Registers newly enabled instances. Eager tests are drawn right away and
    /// may enable further instances; the rest join the back of the queue.
    fn absorb(&mut self, mut keys: Vec<InstanceKey>) -> Result<()> {
        loop {
            let mut new_objects = Vec::new();
            let mut new_atoms = Vec::new();
            for key in keys {
                let eager = self.problem.streams[key.stream].eager;
                let (id, _) = self.pool.get_or_insert(key);
                if eager {
                    self.draw(id, &mut new_objects, &mut new_atoms)?;
                } else {
                    self.queue.push_back(id);
                }
            }
            if new_objects.is_empty() && new_atoms.is_empty() {
                return Ok(());
            }
            keys = self.enabler.update(&self.problem.streams, &self.atoms, &new_atoms, &self.objects, &new_objects);
        }
    }

    /// Pops the front instance and draws once from it. Newly enabled
    /// instances are queued before the popped instance is re-queued.
    pub fn draw_step(&mut self) -> Result<DrawStep> {
        let id = self
            .queue
            .pop_front()
            .ok_or_else(|| Error::InternalFault("draw_step on an empty queue".into()))?;
        let mut new_objects = Vec::new();
        let mut new_atoms = Vec::new();
        let produced = self.draw(id, &mut new_objects, &mut new_atoms)?;
        let keys = self.enabler.update(&self.problem.streams, &self.atoms, &new_atoms, &self.objects, &new_objects);
        self.absorb(keys)?;
        if !self.pool.get(id).is_exhausted() {
            self.queue.push_back(id);
        }
        Ok(if produced { DrawStep::Produced } else { DrawStep::Exhausted })
    }

    fn plan(&mut self, clock: &Clock, search: &SearchConfig) -> Result<SPlanOutcome> {
        // Objects and atoms only grow, so grounding picks up where it left off.
        self.grounder.extend(&self.objects, self.atoms.atoms());
        let task = self.grounder.task(&self.problem.goal)?;
        self.stats.iterations += 1;
        let r = solve_task(&task, &clock.search_config(search));
        self.stats.expanded += r.stats.expanded;
        Ok(r.outcome)
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
            trace: Vec::new(),
            permanently_blocked: Vec::new(),
        }
    }
}

/// Runs the incremental solver.
///
/// Returns `Solved` with a plan over concrete objects, `Infeasible` once the
/// queue is empty and the planner fails, or `Timeout` when a budget runs out.
pub fn solve_incremental<C: Cost>(problem: &ProblemInstance<C>, config: &IncrementalConfig) -> Result<SolveReport> {
    if config.k == 0 {
        return Err(Error::InvalidConfig("K must be at least 1".into()));
    }
    let clock = Clock::new(&config.budget);
    let mut st = IncrementalState::new(problem, config.check_certificates)?;
    loop {
        if !clock.may_plan(&st.stats) {
            return Ok(st.into_report(Status::Timeout, &clock));
        }
        match st.plan(&clock, &config.search)? {
            SPlanOutcome::Plan(plan) => return Ok(st.into_report(Status::Solved(plan), &clock)),
            SPlanOutcome::Timeout => return Ok(st.into_report(Status::Timeout, &clock)),
            SPlanOutcome::Infeasible => {}
        }
        if st.queue.is_empty() {
            return Ok(st.into_report(Status::Infeasible, &clock));
        }
        for _ in 0..config.k.min(st.queue.len()) {
            if !clock.may_draw(&st.stats) {
                return Ok(st.into_report(Status::Timeout, &clock));
            }
            st.draw_step()?;
        }
    }
}

/// Objects and atoms after `rounds` rounds of exhaustive fair enumeration.
///
/// Each round first enables every instance whose inputs are certified and
/// then draws once from every live instance. Every object reachable by a
/// finite chain of draws appears after finitely many rounds.
pub fn enumerate_universe<C: Cost>(
    problem: &ProblemInstance<C>,
    rounds: usize,
) -> Result<(ObjectRegistry, Vec<ObjectRef>, Vec<Atom>)> {
    problem.validate()?;
    let mut registry = problem.registry.clone();
    let mut objects: Vec<ObjectRef> = Vec::new();
    let mut object_set = FxHashSet::default();
    for &o in &problem.objects {
        if object_set.insert(o) {
            objects.push(o);
        }
    }
    let mut atoms = AtomIndex::from_atoms(&problem.init);
    let mut pool = InstancePool::new();
    let mut enabler = StreamEnabler::new();
    let mut live: Vec<InstanceId> = Vec::new();
    for _ in 0..rounds {
        for key in enabler.all(&problem.streams, &atoms, &objects) {
            live.push(pool.get_or_insert(key).0);
        }
        for &id in &live {
            let schema = &problem.streams[pool.get(id).key.stream];
            if let Draw::Tuple { outputs, certified } = pool.get_mut(id).next_tuple(schema, &mut registry, false)? {
                for o in outputs {
                    if object_set.insert(o) {
                        objects.push(o);
                    }
                }
                for a in certified {
                    atoms.insert(a);
                }
            }
        }
        live.retain(|&id| !pool.get(id).is_exhausted());
    }
    Ok((registry, objects, atoms.atoms().to_vec()))
}
