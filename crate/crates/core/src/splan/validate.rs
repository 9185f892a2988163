use rustc_hash::FxHashSet;

use super::plan::Plan;
use crate::model::{join, Atom, AtomIndex, AxiomSchema, Literal, ObjectRef, OperatorSchema, PredicateKind, PredicateTable};

/// Lifted view of a planning task, used for plan validation.
pub struct PlanningView<'a, C> {
    pub predicates: &'a PredicateTable,
    pub operators: &'a [OperatorSchema<C>],
    pub axioms: &'a [AxiomSchema],
    pub objects: &'a [ObjectRef],
    /// Static and fluent atoms of the initial state.
    pub init: &'a [Atom],
    pub goal: &'a [Literal],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureReport {
    /// Failing step, or `None` when the goal does not hold at the end.
    pub step: Option<usize>,
    pub missing: Vec<Literal>,
    pub reason: String,
}

/// Simulates `plan` from the initial state, checking every precondition and the goal.
pub fn validate_plan<C>(view: &PlanningView<'_, C>, plan: &Plan) -> Result<(), FailureReport> {
    let is_static = |a: &Atom| view.predicates.kind(a.predicate) == PredicateKind::Static;
    let statics: FxHashSet<Atom> = view.init.iter().filter(|a| is_static(a)).cloned().collect();
    let mut fluents: Vec<Atom> = view.init.iter().filter(|a| !is_static(a)).cloned().collect();
    for (i, step) in plan.steps.iter().enumerate() {
        let fail = |missing: Vec<Literal>, reason: &str| FailureReport {
            step: Some(i),
            missing,
            reason: reason.to_string(),
        };
        let op = view
            .operators
            .get(step.operator)
            .ok_or_else(|| fail(Vec::new(), "unknown operator"))?;
        if step.args.len() != op.arity() {
            return Err(fail(Vec::new(), "wrong number of arguments"));
        }
        let b = &step.args;
        let mut missing: Vec<Literal> = op
            .stat
            .iter()
            .map(|p| p.ground(b))
            .filter(|a| !statics.contains(a))
            .map(Literal::pos)
            .collect();
        let state = closure(view, &fluents, &statics);
        for l in &op.pre {
            let a = l.atom.ground(b);
            if state.contains(&a) != l.positive {
                missing.push(Literal { atom: a, positive: l.positive });
            }
        }
        if !missing.is_empty() {
            return Err(fail(missing, "precondition violated"));
        }
        let dels: FxHashSet<Atom> = op.dels().map(|p| p.ground(b)).collect();
        let adds: Vec<Atom> = op.adds().map(|p| p.ground(b)).collect();
        fluents.retain(|a| !dels.contains(a) || adds.contains(a));
        for a in adds {
            if !fluents.contains(&a) {
                fluents.push(a);
            }
        }
    }
    let state = closure(view, &fluents, &statics);
    let missing: Vec<Literal> = view
        .goal
        .iter()
        .filter(|l| {
            let holds = if is_static(&l.atom) { statics.contains(&l.atom) } else { state.contains(&l.atom) };
            holds != l.positive
        })
        .cloned()
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(FailureReport {
            step: None,
            missing,
            reason: "goal not reached".into(),
        })
    }
}

/// Fluents plus the naive fixpoint of all axioms.
fn closure<C>(view: &PlanningView<'_, C>, fluents: &[Atom], statics: &FxHashSet<Atom>) -> FxHashSet<Atom> {
    let mut index = AtomIndex::from_atoms(statics.iter().chain(fluents));
    let fluent_set: FxHashSet<&Atom> = fluents.iter().collect();
    loop {
        let mut new = Vec::new();
        for ax in view.axioms {
            let conds = ax.positive_conditions();
            join(&conds, ax.arity(), &index, None, view.objects, &mut |b| {
                let negs_ok = ax
                    .pre
                    .iter()
                    .filter(|l| !l.positive)
                    .all(|l| !fluent_set.contains(&l.atom.ground(b)));
                if negs_ok {
                    new.push(ax.head.ground(b));
                }
            });
        }
        let mut grew = false;
        for a in new {
            grew |= index.insert(a);
        }
        if !grew {
            break;
        }
    }
    index
        .atoms()
        .iter()
        .filter(|a| view.predicates.kind(a.predicate) != PredicateKind::Static)
        .cloned()
        .collect()
}
