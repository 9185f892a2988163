mod common;

use common::{dijkstra, ground_instances, initial_state, random_task, replay, StateSet};
use proptest::prelude::*;
use stripstream::model::Atom;
use stripstream::splan::{
    ground, heuristic, search, validate_plan, GroundTask, GroundingInput, HeuristicKind, PlanningView,
    SearchConfig, SearchOutcome, State, Strategy,
};
use stripstream::{IntProblem, IntTask};

fn ground_task(p: &IntProblem) -> IntTask {
    ground(&GroundingInput::new(&p.predicates, &p.operators, &p.axioms, &p.objects, &p.init, &p.goal)).unwrap()
}

fn steps(task: &IntTask, plan: &[usize]) -> Vec<(usize, Vec<stripstream::model::ObjectRef>)> {
    plan.iter()
        .map(|&i| (task.actions[i].operator, task.actions[i].args.to_vec()))
        .collect()
}

/// Fluent part of an oracle state as a ground state. Static atoms are compiled away.
fn to_state(task: &GroundTask<u64>, s: &StateSet) -> State {
    State::new(s.iter().filter_map(|a: &Atom| task.fact_id(a)).collect())
}

fn check_against_oracle(seed: u64) -> Result<usize, TestCaseError> {
    let p = random_task(seed);
    prop_assume!(ground_instances(&p) <= 200);
    let task = ground_task(&p);
    let (outcome, _) = search(&task, &SearchConfig::optimal());
    let (best, settled) = dijkstra(&p, &initial_state(&p));
    match (&outcome, best) {
        (SearchOutcome::Plan(plan), Some(c)) => {
            prop_assert_eq!(replay(&p, &steps(&task, plan)), Some(c), "seed {}", seed);
        }
        (SearchOutcome::Infeasible, None) => {}
        (o, b) => prop_assert!(false, "seed {seed}: search {o:?}, oracle {b:?}"),
    }
    let mut samples = 0;
    for (s, _) in settled.iter().take(40) {
        let state = to_state(&task, s);
        let h = heuristic(&state, &task, HeuristicKind::HMax, true);
        match (h, dijkstra(&p, s).0) {
            (Some(h), Some(opt)) => prop_assert!(h <= opt, "seed {seed}: h={h} > h*={opt}"),
            (None, Some(opt)) => prop_assert!(false, "seed {seed}: dead end reported, h*={opt}"),
            _ => {}
        }
        samples += 1;
    }
    Ok(samples)
}

#[test]
fn astar_hmax_matches_oracle_on_200_tasks() {
    let mut checked = 0;
    let mut samples = 0;
    let mut seed = 0;
    while checked < 200 {
        let p = random_task(seed);
        if ground_instances(&p) <= 200 {
            samples += check_against_oracle(seed).unwrap();
            checked += 1;
        }
        seed += 1;
    }
    assert!(samples >= 1000, "only {samples} heuristic samples");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gbfs_plans_validate(seed in 0u64..100_000) {
        let p = random_task(seed);
        prop_assume!(ground_instances(&p) <= 200);
        let task = ground_task(&p);
        let feasible = dijkstra(&p, &initial_state(&p)).0.is_some();
        for kind in [HeuristicKind::HFf, HeuristicKind::HAdd, HeuristicKind::HMax] {
            let config = SearchConfig { strategy: Strategy::Gbfs, heuristic: kind, ..SearchConfig::default() };
            match search(&task, &config).0 {
                SearchOutcome::Plan(plan) => {
                    prop_assert!(feasible);
                    prop_assert!(replay(&p, &steps(&task, &plan)).is_some());
                    let rendered = stripstream::splan::Plan {
                        steps: plan.iter().map(|&i| stripstream::splan::PlanStep {
                            operator: task.actions[i].operator,
                            args: task.actions[i].args.clone(),
                        }).collect(),
                    };
                    let view = PlanningView {
                        predicates: &p.predicates,
                        operators: &p.operators,
                        axioms: &p.axioms,
                        objects: &p.objects,
                        init: &p.init,
                        goal: &p.goal,
                    };
                    prop_assert!(validate_plan(&view, &rendered).is_ok());
                }
                SearchOutcome::Infeasible => prop_assert!(!feasible),
                SearchOutcome::Timeout => prop_assert!(false, "timeout without a budget"),
            }
        }
    }

    #[test]
    fn oracle_agreement_holds_for_arbitrary_seeds(seed in 1_000_000u64..2_000_000) {
        check_against_oracle(seed)?;
    }
}
