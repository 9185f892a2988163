use serde::{Deserialize, Serialize};

use super::discrete::KinVariant;
use super::kinematics::{collision_free, kin_valid, KinematicsRule};
use super::pick_place::{add_schemas, block_name, Vocabulary};
use super::sampler::{instance_seed, SamplerKind, UnitSampler};
use crate::args;
use crate::model::{AxiomSchema, Generator, GeneratorError, Payload, ProblemInstance, StreamSchema};
use crate::{Cost, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Layout {
    /// Block `A` at `p0`; the goal is to hold it.
    Simple { p0: f64 },
    /// Block `A` at `p0` must move to `goal`, which overlaps block `B` at `obstacle`.
    /// `extra_poses` pose constants are spread over poses that overlap
    /// `obstacle`, `goal` and each other, so no plan needs them.
    Obstruction {
        p0: f64,
        obstacle: f64,
        goal: f64,
        extra_poses: usize,
    },
    /// The default obstruction plus `n` blocks parked beyond the workspace,
    /// each with the goal of staying where it is. Parked blocks are fixtures:
    /// their poses are ordinary pose constants but they cannot be picked.
    Distractor { n: usize },
}

impl Layout {
    pub fn obstruction() -> Self {
        Layout::Obstruction {
            p0: 2.0,
            obstacle: 6.0,
            goal: 6.5,
            extra_poses: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousConfig {
    /// Poses are sampled from `[0, length]`.
    pub length: f64,
    /// Gripper width, greater than the unit block width.
    pub delta: f64,
    pub layout: Layout,
    pub kin: KinVariant,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub initial_conf: f64,
    pub eager_kin_tests: bool,
    pub eager_collision_tests: bool,
}

impl ContinuousConfig {
    pub fn new(layout: Layout, kin: KinVariant, delta: f64, seed: u64) -> Self {
        ContinuousConfig {
            length: 10.0,
            delta,
            layout,
            kin,
            sampler: SamplerKind::Uniform,
            seed,
            initial_conf: 0.0,
            eager_kin_tests: true,
            eager_collision_tests: false,
        }
    }

    pub fn simple(p0: f64, kin: KinVariant, delta: f64, seed: u64) -> Self {
        Self::new(Layout::Simple { p0 }, kin, delta, seed)
    }
}

/// Spacing between parked blocks and extra pose constants.
const PARK_SPACING: f64 = 1.5;

pub fn pose(x: f64) -> Payload {
    Payload::tagged("p", [Payload::Real(x)])
}

pub fn conf(x: f64) -> Payload {
    Payload::tagged("q", [Payload::Real(x)])
}

pub fn value(p: &Payload) -> Option<f64> {
    p.tagged_value().and_then(Payload::as_real)
}

struct FnGenerator<F>(F);

impl<F: FnMut() -> Option<Vec<Payload>> + Send> Generator for FnGenerator<F> {
    fn next_tuple(&mut self) -> std::result::Result<Option<Vec<Payload>>, GeneratorError> {
        Ok((self.0)())
    }
}

fn boxed<F: FnMut() -> Option<Vec<Payload>> + Send + 'static>(f: F) -> Box<dyn Generator> {
    Box::new(FnGenerator(f))
}

/// Builds the one-dimensional continuous pick-and-place problem.
pub fn build_continuous<C: Cost>(cfg: &ContinuousConfig) -> Result<ProblemInstance<C>> {
    if !(cfg.length.is_finite() && cfg.length > 0.0) {
        return Err(Error::InvalidConfig("length must be positive".into()));
    }
    if !(cfg.delta.is_finite() && cfg.delta > 1.0) {
        return Err(Error::InvalidConfig("gripper width must exceed the block width 1".into()));
    }
    let l = cfg.length;
    let (blocks, goals, extra): (Vec<f64>, Vec<Option<f64>>, Vec<f64>) = match cfg.layout {
        Layout::Simple { p0 } => (vec![p0], vec![None], Vec::new()),
        Layout::Obstruction {
            p0,
            obstacle,
            goal,
            extra_poses,
        } => (
            vec![p0, obstacle],
            vec![Some(goal), None],
            {
                let half = (1.0 - (obstacle - goal).abs() / 2.0).min(0.45);
                let mid = (obstacle + goal) / 2.0;
                let (lo, hi) = (mid - half, mid + half);
                (0..extra_poses)
                    .map(|k| lo + (hi - lo) * (k + 1) as f64 / (extra_poses + 1) as f64)
                    .collect()
            },
        ),
        Layout::Distractor { n } => {
            let Layout::Obstruction { p0, obstacle, goal, .. } = Layout::obstruction() else {
                unreachable!()
            };
            let mut b = vec![p0, obstacle];
            let mut g = vec![Some(goal), None];
            for k in 0..n {
                let x = l + 1.0 + PARK_SPACING * k as f64;
                b.push(x);
                g.push(Some(x));
            }
            (b, g, Vec::new())
        }
    };
    let within = |x: f64| x.is_finite() && (0.0..=l).contains(&x);
    for (i, &p) in blocks.iter().enumerate() {
        let parked = i >= 2 && matches!(cfg.layout, Layout::Distractor { .. });
        if !parked && !within(p) {
            return Err(Error::LayoutInfeasible(format!("pose {p} outside [0, {l}]")));
        }
        if blocks[..i].iter().any(|&q| !collision_free(p, q)) {
            return Err(Error::LayoutInfeasible(format!("block at {p} overlaps another block")));
        }
    }
    for g in goals.iter().take(2).flatten() {
        if !within(*g) {
            return Err(Error::LayoutInfeasible(format!("goal {g} outside [0, {l}]")));
        }
    }
    if !within(cfg.initial_conf) {
        return Err(Error::LayoutInfeasible("initial configuration outside the workspace".into()));
    }

    let mut prob = ProblemInstance::new(&format!("continuous-{}", cfg.kin));
    let v = Vocabulary::declare(&mut prob)?;
    let names: Vec<_> = (0..blocks.len()).map(|i| prob.object(Payload::symbol(&block_name(i)))).collect();
    let q0 = prob.object(conf(cfg.initial_conf));
    prob.init_atom(v.is_conf, [q0]);
    prob.init_atom(v.at_conf, [q0]);
    prob.init_atom(v.hand_empty, []);
    let parked = |i: usize| i >= 2 && matches!(cfg.layout, Layout::Distractor { .. });
    let fixed = if names.len() > 2 && parked(2) {
        Some(prob.declare("Fixed", 2, crate::model::PredicateKind::Static)?)
    } else {
        None
    };
    for (i, &b) in names.iter().enumerate() {
        let p = prob.object(pose(blocks[i]));
        match fixed {
            Some(f) if parked(i) => prob.init_atom(f, [b, p]),
            _ => prob.init_atom(v.is_block, [b]),
        }
        prob.init_atom(v.is_pose, [p]);
        prob.init_atom(v.at_pose, [b, p]);
    }
    for &x in &extra {
        let p = prob.object(pose(x));
        prob.init_atom(v.is_pose, [p]);
    }
    match cfg.layout {
        Layout::Simple { .. } => prob.goal_atom(v.holding, [names[0]]),
        _ => {
            for (i, g) in goals.iter().enumerate() {
                if let Some(g) = *g {
                    let p = prob.object(pose(g));
                    prob.init_atom(v.is_pose, [p]);
                    prob.goal_atom(v.at_pose, [names[i], p]);
                }
            }
        }
    }
    add_schemas(&mut prob, &v, &names)?;

    let rule = KinematicsRule::new(cfg.delta);
    let delta = cfg.delta;
    let (seed, kind) = (cfg.seed, cfg.sampler);
    let kin_ok = move |i: &[Payload], o: &[Payload]| {
        let all: Vec<&Payload> = i.iter().chain(o).collect();
        matches!((value(all[0]), value(all[1])), (Some(p), Some(q)) if kin_valid(p, q, delta))
    };
    let pose_u = || -> Result<StreamSchema<C>> {
        StreamSchema::build("Pose-U", &[], &["P"])
            .out(v.is_pose, args!["P"])
            .generator(move |x| {
                let mut s = UnitSampler::new(kind, instance_seed(seed, "Pose-U", x));
                boxed(move || Some(vec![pose(s.next_unit() * l)]))
            })
            .checker(move |_, o| value(&o[0]).is_some_and(|p| (0.0..=l).contains(&p)))
            .finish()
    };
    match cfg.kin {
        KinVariant::C => {
            prob.streams.push(pose_u()?);
            prob.streams.push(
                StreamSchema::build("Kin-C", &["P"], &["Q"])
                    .inp(v.is_pose, args!["P"])
                    .out(v.is_conf, args!["Q"])
                    .out(v.is_kin, args!["P", "Q"])
                    .generator(move |x| {
                        let p = value(&x[0]).unwrap_or(f64::NAN);
                        let mut s = UnitSampler::new(kind, instance_seed(seed, "Kin-C", x));
                        let w = rule.half_band();
                        let mut first = true;
                        boxed(move || {
                            if !p.is_finite() {
                                return None;
                            }
                            let mut q = p;
                            if !std::mem::take(&mut first) {
                                q = p + (2.0 * s.next_unit() - 1.0) * w;
                                if !rule.valid(p, q) {
                                    q = p;
                                }
                            }
                            Some(vec![conf(q)])
                        })
                    })
                    .checker(kin_ok)
                    .finish()?,
            );
        }
        KinVariant::U => {
            prob.streams.push(
                StreamSchema::build("Kin-U", &[], &["P", "Q"])
                    .out(v.is_pose, args!["P"])
                    .out(v.is_conf, args!["Q"])
                    .out(v.is_kin, args!["P", "Q"])
                    .generator(move |x| {
                        let mut s = UnitSampler::new(kind, instance_seed(seed, "Kin-U", x));
                        let w = rule.half_band();
                        boxed(move || {
                            let (a, b) = s.next_pair();
                            let p = a * l;
                            let mut q = p + (2.0 * b - 1.0) * w;
                            if !rule.valid(p, q) {
                                q = p;
                            }
                            Some(vec![pose(p), conf(q)])
                        })
                    })
                    .checker(kin_ok)
                    .finish()?,
            );
        }
        KinVariant::T => {
            prob.streams.push(pose_u()?);
            prob.streams.push(
                StreamSchema::build("Conf-U", &[], &["Q"])
                    .out(v.is_conf, args!["Q"])
                    .generator(move |x| {
                        let mut s = UnitSampler::new(kind, instance_seed(seed, "Conf-U", x));
                        boxed(move || Some(vec![conf(s.next_unit() * l)]))
                    })
                    .finish()?,
            );
            prob.streams.push(
                StreamSchema::build("Kin-T", &["P", "Q"], &[])
                    .inp(v.is_pose, args!["P"])
                    .inp(v.is_conf, args!["Q"])
                    .out(v.is_kin, args!["P", "Q"])
                    .test(move |x| matches!((value(&x[0]), value(&x[1])), (Some(p), Some(q)) if kin_valid(p, q, delta)))
                    .checker(kin_ok)
                    .eager(cfg.eager_kin_tests)
                    .finish()?,
            );
        }
    }
    if blocks.len() >= 2 {
        let free = |x: &[Payload]| matches!((value(&x[1]), value(&x[3])), (Some(a), Some(b)) if collision_free(a, b));
        prob.streams.push(
            StreamSchema::build("CFree-T", &["B1", "P1", "B2", "P2"], &[])
                .inp(v.is_block, args!["B1"])
                .inp(v.is_pose, args!["P1"])
                .inp(v.is_block, args!["B2"])
                .inp(v.is_pose, args!["P2"])
                .out(v.is_collision_free, args!["B1", "P1", "B2", "P2"])
                .test(free)
                .checker(move |x, _| free(x))
                .eager(cfg.eager_collision_tests)
                .finish()?,
        );
    }
    if let Some(f) = fixed {
        prob.axioms.push(
            AxiomSchema::build("SafeAxiomF", &["B1", "P1", "B2", "P2"])
                .stat(f, args!["B1", "P1"])
                .stat(v.is_block, args!["B2"])
                .stat(v.is_pose, args!["P2"])
                .stat(v.is_collision_free, args!["B1", "P1", "B2", "P2"])
                .pre(v.at_pose, args!["B1", "P1"])
                .head(v.safe, args!["B1", "B2", "P2"])
                .finish()?,
        );
        let free = |x: &[Payload]| matches!((value(&x[1]), value(&x[3])), (Some(a), Some(b)) if collision_free(a, b));
        prob.streams.push(
            StreamSchema::build("CFreeF-T", &["B1", "P1", "B2", "P2"], &[])
                .inp(f, args!["B1", "P1"])
                .inp(v.is_block, args!["B2"])
                .inp(v.is_pose, args!["P2"])
                .out(v.is_collision_free, args!["B1", "P1", "B2", "P2"])
                .test(free)
                .checker(move |x, _| free(x))
                .eager(cfg.eager_collision_tests)
                .finish()?,
        );
    }
    Ok(prob)
}
