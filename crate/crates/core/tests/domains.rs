use proptest::prelude::*;
use stripstream::domains::continuous::value;
use stripstream::domains::{
    build_continuous, build_discrete, collision_free, kin_valid, ContinuousConfig, DiscreteConfig, KinVariant, Layout,
};
use stripstream::focused::{solve_focused, FocusedConfig};
use stripstream::incremental::{solve_incremental, IncrementalConfig};
use stripstream::solve::{Budget, SolveReport};
use stripstream::Problem;

fn incremental() -> IncrementalConfig {
    IncrementalConfig {
        budget: Budget::wall(30.0),
        ..IncrementalConfig::default()
    }
}

/// Checks every certified `IsKin` and `IsCollisionFree` atom against the geometry.
fn certified_facts_hold(p: &Problem, r: &SolveReport, delta: f64) -> usize {
    let is_kin = p.predicates.lookup("IsKin").unwrap();
    let cfree = p.predicates.lookup("IsCollisionFree").unwrap();
    let x = |o| value(r.registry.payload(o)).unwrap();
    let mut checked = 0;
    for a in &r.certified {
        if a.predicate == is_kin {
            assert!(kin_valid(x(a.args[0]), x(a.args[1]), delta), "{a:?}");
            checked += 1;
        } else if a.predicate == cfree {
            assert!(collision_free(x(a.args[1]), x(a.args[3])), "{a:?}");
            checked += 1;
        }
    }
    checked
}

#[test]
fn certified_continuous_facts_are_geometrically_valid() {
    let mut checked = 0;
    for seed in 0..5 {
        for kin in [KinVariant::T, KinVariant::C] {
            let cfg = ContinuousConfig::new(Layout::obstruction(), kin, 1.5, seed);
            let p: Problem = build_continuous(&cfg).unwrap();
            let r = solve_incremental(&p, &incremental()).unwrap();
            assert!(r.solved());
            checked += certified_facts_hold(&p, &r, 1.5);
            let r = solve_focused(&p, &FocusedConfig::default()).unwrap();
            assert!(r.solved());
            checked += certified_facts_hold(&p, &r, 1.5);
        }
    }
    assert!(checked > 0);
}

#[test]
fn continuous_draws_are_reproducible() {
    let cfg = ContinuousConfig::new(Layout::Distractor { n: 4 }, KinVariant::C, 1.5, 11);
    let run = || {
        let p: Problem = build_continuous(&cfg).unwrap();
        let r = solve_focused(&p, &FocusedConfig::default()).unwrap();
        let payloads: Vec<_> = r.objects.iter().map(|&o| r.registry.payload(o).clone()).collect();
        let plan = r.plan().cloned();
        (r.draws, payloads, plan)
    };
    assert_eq!(run(), run());
}

#[test]
fn different_seeds_draw_different_samples() {
    let confs = |seed| {
        let p: Problem = build_continuous(&ContinuousConfig::simple(3.0, KinVariant::T, 1.5, seed)).unwrap();
        let r = solve_incremental(&p, &incremental()).unwrap();
        r.objects.iter().map(|&o| r.registry.payload(o).clone()).collect::<Vec<_>>()
    };
    assert_ne!(confs(1), confs(2));
}

#[test]
fn distractor_blocks_stay_parked() {
    let p: Problem = build_continuous(&ContinuousConfig::new(Layout::Distractor { n: 3 }, KinVariant::C, 1.5, 0)).unwrap();
    let r = solve_incremental(&p, &incremental()).unwrap();
    r.validate(&p).unwrap();
    let pick = p.operators.iter().position(|o| o.name == "Pick").unwrap();
    let picked: Vec<String> = r
        .plan()
        .unwrap()
        .steps
        .iter()
        .filter(|s| s.operator == pick)
        .map(|s| r.registry.name(s.args[0]))
        .collect();
    assert!(picked.iter().all(|b| b == "A" || b == "B"), "{picked:?}");
}

#[test]
fn discrete_shift_plans_validate_for_every_variant() {
    for n in 1..=3 {
        for kin in [KinVariant::U, KinVariant::T, KinVariant::C] {
            let p: Problem = build_discrete(&DiscreteConfig::shift(n, kin)).unwrap();
            let r = solve_incremental(&p, &incremental()).unwrap();
            assert!(r.solved(), "n={n} {kin}");
            r.validate(&p).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn discrete_kin_c_calls_do_not_depend_on_p0(p0 in 1i64..1_000_000) {
        let base: Problem = build_discrete(&DiscreteConfig::holding(1, KinVariant::C)).unwrap();
        let base = solve_incremental(&base, &incremental()).unwrap();
        let p: Problem = build_discrete(&DiscreteConfig::holding(p0, KinVariant::C)).unwrap();
        let r = solve_incremental(&p, &incremental()).unwrap();
        prop_assert!(r.solved());
        prop_assert!(r.validate(&p).is_ok());
        prop_assert_eq!(r.stats.calls, base.stats.calls);
        prop_assert_eq!(r.stats.iterations, base.stats.iterations);
    }

    #[test]
    fn discrete_kin_u_needs_at_least_p0_draws(p0 in 1i64..60) {
        let p: Problem = build_discrete(&DiscreteConfig::holding(p0, KinVariant::U)).unwrap();
        let r = solve_incremental(&p, &incremental()).unwrap();
        prop_assert!(r.solved());
        prop_assert!(r.stats.calls >= p0 as u64);
    }

    #[test]
    fn continuous_instances_build_for_any_seed(seed: u64, n in 0usize..6, kin in prop_oneof![Just(KinVariant::U), Just(KinVariant::T), Just(KinVariant::C)]) {
        let p: Problem = build_continuous(&ContinuousConfig::new(Layout::Distractor { n }, kin, 1.5, seed)).unwrap();
        prop_assert!(p.validate().is_ok());
    }
}
