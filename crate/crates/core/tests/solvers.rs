mod common;

use common::{live_streams, HiddenGraph};
use proptest::prelude::*;
use stripstream::domains::{build_continuous, build_discrete, ContinuousConfig, DiscreteConfig, KinVariant, Layout};
use stripstream::focused::{solve_focused, FocusedConfig};
use stripstream::incremental::{solve_incremental, IncrementalConfig, IncrementalState};
use stripstream::solve::{Budget, SolveReport, Status};
use stripstream::{Cost, Problem};

fn incremental(k: usize) -> IncrementalConfig {
    IncrementalConfig {
        k,
        budget: Budget::wall(30.0),
        ..IncrementalConfig::default()
    }
}

fn focused() -> FocusedConfig {
    FocusedConfig {
        budget: Budget::wall(30.0),
        record_trace: true,
        ..FocusedConfig::default()
    }
}

fn assert_solved<C: Cost>(p: &stripstream::model::ProblemInstance<C>, r: &SolveReport) {
    assert!(r.solved(), "status {:?}", r.status);
    r.validate(p).unwrap();
}

#[test]
fn finite_streams_feasible_problems_are_solved() {
    let mut seen = 0;
    let mut seed = 0;
    while seen < 50 {
        let g = HiddenGraph::random(seed, 7, true);
        seed += 1;
        assert!(g.reachable());
        let p = g.problem();
        assert_solved(&p, &solve_incremental(&p, &incremental(1)).unwrap());
        assert_solved(&p, &solve_focused(&p, &focused()).unwrap());
        seen += 1;
    }
}

#[test]
fn finite_streams_infeasible_problems_terminate() {
    for seed in 0..20 {
        let g = HiddenGraph::random(1000 + seed, 7, false);
        assert!(!g.reachable());
        let p = g.problem();
        let r = solve_incremental(&p, &incremental(1)).unwrap();
        assert_eq!(r.status, Status::Infeasible, "incremental, seed {seed}");
        let r = solve_focused(&p, &focused()).unwrap();
        assert_eq!(r.status, Status::Infeasible, "focused, seed {seed}");
    }
}

#[test]
fn incremental_draws_are_fair() {
    for j in [1, 3, 5] {
        let p = live_streams(j);
        let mut st = IncrementalState::new(&p, true).unwrap();
        let m = 7;
        for _ in 0..j * m {
            st.draw_step().unwrap();
        }
        let mut counts = vec![0; j];
        for d in &st.draws {
            counts[d.stream] += 1;
        }
        assert!(counts.iter().all(|&c| c == m), "{counts:?}");
    }
}

#[test]
fn live_streams_never_let_incremental_claim_infeasible() {
    let p = live_streams(2);
    let cfg = IncrementalConfig {
        budget: Budget {
            max_draws: Some(50),
            ..Budget::default()
        },
        ..IncrementalConfig::default()
    };
    let r = solve_incremental(&p, &cfg).unwrap();
    assert_eq!(r.status, Status::Timeout);
    assert_eq!(r.draws.len(), 50);
    // No operator achieves the goal, so even the optimistic problem fails.
    let r = solve_focused(&p, &focused()).unwrap();
    assert_eq!(r.status, Status::Infeasible);
    assert_eq!(r.stats.calls, 0);
}

fn stream_names(p: &Problem, r: &SolveReport, iteration: usize) -> Vec<String> {
    let mut names: Vec<String> = r.trace[iteration]
        .plan
        .as_ref()
        .unwrap()
        .iter()
        .filter_map(|s| s.stream.map(|i| p.streams[i].name.clone()))
        .collect();
    names.sort();
    names
}

#[test]
fn focused_walkthrough_on_obstruction() {
    let p: Problem = build_continuous(&ContinuousConfig::new(Layout::obstruction(), KinVariant::C, 1.5, 0)).unwrap();
    let r = solve_focused(&p, &focused()).unwrap();
    assert_eq!(stream_names(&p, &r, 0), ["CFree-T", "Kin-C", "Kin-C"]);
    let name = |o| r.registry.name(o);
    let blocked = r.trace[0]
        .permanently_blocked
        .iter()
        .map(|k| format!("{}{}", p.streams[k.stream].name, r.registry.names(&k.inputs)))
        .collect::<Vec<_>>();
    assert!(blocked.contains(&"CFree-T(B, p(6), A, p(6.5))".to_string()), "{blocked:?}");
    assert_solved(&p, &r);
    let mut picks: Vec<String> = r
        .plan()
        .unwrap()
        .steps
        .iter()
        .filter(|s| matches!(p.operators[s.operator].name.as_str(), "Pick" | "Place"))
        .map(|s| format!("{}({})", p.operators[s.operator].name, name(s.args[0])))
        .collect();
    picks.sort();
    assert_eq!(picks, ["Pick(A)", "Pick(B)", "Place(A)", "Place(B)"]);
}

#[test]
fn both_solvers_handle_every_discrete_variant() {
    for kin in [KinVariant::U, KinVariant::T, KinVariant::C] {
        let p: Problem = build_discrete(&DiscreteConfig::holding(3, kin)).unwrap();
        assert_solved(&p, &solve_incremental(&p, &incremental(1)).unwrap());
        assert_solved(&p, &solve_focused(&p, &focused()).unwrap());
        let p: Problem = build_discrete(&DiscreteConfig::shift(2, kin)).unwrap();
        assert_solved(&p, &solve_incremental(&p, &incremental(10)).unwrap());
        assert_solved(&p, &solve_focused(&p, &focused()).unwrap());
    }
}

#[test]
fn focused_with_eager_commits_still_solves() {
    let p: Problem = build_continuous(&ContinuousConfig::new(Layout::obstruction(), KinVariant::C, 1.5, 3)).unwrap();
    let cfg = FocusedConfig {
        eager_commits: 2,
        ..focused()
    };
    assert_solved(&p, &solve_focused(&p, &cfg).unwrap());
}

#[test]
fn zero_theta_is_rejected() {
    let p: Problem = build_discrete(&DiscreteConfig::holding(3, KinVariant::C)).unwrap();
    let cfg = FocusedConfig {
        theta: 0,
        ..FocusedConfig::default()
    };
    assert!(solve_focused(&p, &cfg).is_err());
    assert!(solve_incremental(&p, &incremental(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hidden_graph_verdicts_match_reachability(seed in 0u64..10_000, nodes in 3i64..8, feasible: bool) {
        let g = HiddenGraph::random(seed, nodes, feasible);
        let p = g.problem();
        let expect = g.reachable();
        for r in [solve_incremental(&p, &incremental(2)).unwrap(), solve_focused(&p, &focused()).unwrap()] {
            prop_assert_eq!(r.solved(), expect);
            if expect {
                prop_assert!(r.validate(&p).is_ok());
            } else {
                prop_assert_eq!(&r.status, &Status::Infeasible);
            }
        }
    }

    #[test]
    fn continuous_kin_c_solves_any_reachable_pose(p0 in 0.0f64..10.0, delta in 1.001f64..3.0, seed: u64) {
        let p: Problem = build_continuous(&ContinuousConfig::simple(p0, KinVariant::C, delta, seed)).unwrap();
        let r = solve_incremental(&p, &incremental(1)).unwrap();
        prop_assert!(r.solved());
        prop_assert!(r.validate(&p).is_ok());
        prop_assert!(r.stats.calls <= 3);
    }
}
