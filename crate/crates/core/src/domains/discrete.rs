use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pick_place::{add_schemas, block_name, Vocabulary};
use crate::args;
use crate::model::{from_iter, Payload, ProblemInstance, StreamSchema};
use crate::{Cost, Error, Result};

/// How `IsKin` is certified.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum KinVariant {
    /// Unconditional stream of kinematic pose/configuration pairs.
    U,
    /// Test on independently generated poses and configurations.
    T,
    /// Conditional stream from a pose to its configurations.
    C,
}

impl FromStr for KinVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("kin-") {
            "u" => Ok(KinVariant::U),
            "t" => Ok(KinVariant::T),
            "c" => Ok(KinVariant::C),
            other => Err(Error::InvalidConfig(format!("unknown kinematics variant `{other}`"))),
        }
    }
}

impl fmt::Display for KinVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KinVariant::U => "Kin-U",
            KinVariant::T => "Kin-T",
            KinVariant::C => "Kin-C",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DiscreteGoal {
    /// Hold the block with this index.
    Holding(usize),
    /// Each listed block rests at the given pose.
    Poses(Vec<(usize, i64)>),
}

/// Integer poses and configurations; a configuration `i` grasps pose `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteConfig {
    /// Initial pose of each block; block 0 is `A`.
    pub initial_poses: Vec<i64>,
    pub goal: DiscreteGoal,
    pub kin: KinVariant,
    /// Pose and configuration generators stop after this many values.
    pub num_poses: u64,
    pub initial_conf: i64,
    pub eager_tests: bool,
}

pub const DEFAULT_NUM_POSES: u64 = 10_000_000_000;

impl DiscreteConfig {
    /// Single block `A` at `p0`; the goal is to hold it.
    pub fn holding(p0: i64, kin: KinVariant) -> Self {
        DiscreteConfig {
            initial_poses: vec![p0],
            goal: DiscreteGoal::Holding(0),
            kin,
            num_poses: DEFAULT_NUM_POSES,
            initial_conf: 0,
            eager_tests: true,
        }
    }

    /// Blocks at `0..n`; block `i` must move to `i + 1`.
    pub fn shift(n: usize, kin: KinVariant) -> Self {
        DiscreteConfig {
            initial_poses: (0..n as i64).collect(),
            goal: DiscreteGoal::Poses((0..n).map(|i| (i, i as i64 + 1)).collect()),
            kin,
            num_poses: DEFAULT_NUM_POSES,
            initial_conf: 0,
            eager_tests: true,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.initial_poses.len()
    }
}

pub fn pose(i: i64) -> Payload {
    Payload::tagged("Pose", [Payload::Int(i)])
}

pub fn conf(i: i64) -> Payload {
    Payload::tagged("Conf", [Payload::Int(i)])
}

fn index_of(p: &Payload) -> Option<i64> {
    p.tagged_value().and_then(Payload::as_int)
}

/// The discrete inverse kinematics: configuration `p` grasps pose `p`.
pub fn inverse_kin(p: i64) -> i64 {
    p
}

fn collide(p1: &Payload, p2: &Payload) -> bool {
    p1 == p2
}

/// Builds the discrete pick-and-place problem.
///
/// Collision checks are only added when there are at least two blocks.
pub fn build_discrete<C: Cost>(cfg: &DiscreteConfig) -> Result<ProblemInstance<C>> {
    let n = cfg.num_blocks();
    if n == 0 {
        return Err(Error::InvalidConfig("at least one block is required".into()));
    }
    if cfg.num_poses == 0 || cfg.num_poses > i64::MAX as u64 {
        return Err(Error::InvalidConfig("num_poses out of range".into()));
    }
    let limit = cfg.num_poses as i64;
    let in_range = |p: i64| (0..limit).contains(&p);
    let goal_poses: Vec<(usize, i64)> = match &cfg.goal {
        DiscreteGoal::Holding(b) => {
            if *b >= n {
                return Err(Error::InvalidConfig(format!("goal block {b} does not exist")));
            }
            Vec::new()
        }
        DiscreteGoal::Poses(g) => g.clone(),
    };
    for (i, &p) in cfg.initial_poses.iter().enumerate() {
        if !in_range(p) {
            return Err(Error::LayoutInfeasible(format!("pose {p} outside 0..{limit}")));
        }
        if cfg.initial_poses[..i].contains(&p) {
            return Err(Error::LayoutInfeasible(format!("two blocks start at pose {p}")));
        }
    }
    for (i, &(b, p)) in goal_poses.iter().enumerate() {
        if b >= n {
            return Err(Error::InvalidConfig(format!("goal block {b} does not exist")));
        }
        if !in_range(p) {
            return Err(Error::LayoutInfeasible(format!("goal pose {p} outside 0..{limit}")));
        }
        if goal_poses[..i].iter().any(|&(b2, p2)| p2 == p && b2 != b) {
            return Err(Error::LayoutInfeasible(format!("two blocks share goal pose {p}")));
        }
    }

    let mut prob = ProblemInstance::new(&format!("discrete-{}", cfg.kin));
    let v = Vocabulary::declare(&mut prob)?;
    let blocks: Vec<_> = (0..n).map(|i| prob.object(Payload::symbol(&block_name(i)))).collect();
    let q0 = prob.object(conf(cfg.initial_conf));
    prob.init_atom(v.is_conf, [q0]);
    prob.init_atom(v.at_conf, [q0]);
    prob.init_atom(v.hand_empty, []);
    for (i, &b) in blocks.iter().enumerate() {
        let p = prob.object(pose(cfg.initial_poses[i]));
        prob.init_atom(v.is_block, [b]);
        prob.init_atom(v.is_pose, [p]);
        prob.init_atom(v.at_pose, [b, p]);
    }
    match &cfg.goal {
        DiscreteGoal::Holding(b) => prob.goal_atom(v.holding, [blocks[*b]]),
        DiscreteGoal::Poses(_) => {
            for &(b, p) in &goal_poses {
                let p = prob.object(pose(p));
                prob.init_atom(v.is_pose, [p]);
                prob.goal_atom(v.at_pose, [blocks[b], p]);
            }
        }
    }
    add_schemas(&mut prob, &v, &blocks)?;

    let kin_ok = |i: &[Payload], o: &[Payload]| {
        let all: Vec<&Payload> = i.iter().chain(o).collect();
        matches!((index_of(all[0]), index_of(all[1])), (Some(p), Some(q)) if q == inverse_kin(p))
    };
    match cfg.kin {
        KinVariant::C => {
            prob.streams.push(pose_stream(&v, limit)?);
            prob.streams.push(
                StreamSchema::build("Kin-C", &["P"], &["Q"])
                    .inp(v.is_pose, args!["P"])
                    .out(v.is_conf, args!["Q"])
                    .out(v.is_kin, args!["P", "Q"])
                    .generator(|x| {
                        let q = index_of(&x[0]).map(|p| vec![conf(inverse_kin(p))]);
                        from_iter(q)
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
                    .generator(move |_| from_iter((0..limit).map(|i| vec![pose(i), conf(inverse_kin(i))])))
                    .checker(kin_ok)
                    .finish()?,
            );
        }
        KinVariant::T => {
            prob.streams.push(pose_stream(&v, limit)?);
            prob.streams.push(
                StreamSchema::build("Conf-U", &[], &["Q"])
                    .out(v.is_conf, args!["Q"])
                    .generator(move |_| from_iter((0..limit).map(|i| vec![conf(i)])))
                    .finish()?,
            );
            prob.streams.push(
                StreamSchema::build("Kin-T", &["P", "Q"], &[])
                    .inp(v.is_pose, args!["P"])
                    .inp(v.is_conf, args!["Q"])
                    .out(v.is_kin, args!["P", "Q"])
                    .test(|x| matches!((index_of(&x[0]), index_of(&x[1])), (Some(p), Some(q)) if q == inverse_kin(p)))
                    .checker(kin_ok)
                    .eager(cfg.eager_tests)
                    .finish()?,
            );
        }
    }
    if n >= 2 {
        prob.streams.push(
            StreamSchema::build("CFree-T", &["B1", "P1", "B2", "P2"], &[])
                .inp(v.is_block, args!["B1"])
                .inp(v.is_pose, args!["P1"])
                .inp(v.is_block, args!["B2"])
                .inp(v.is_pose, args!["P2"])
                .out(v.is_collision_free, args!["B1", "P1", "B2", "P2"])
                .test(|x| !collide(&x[1], &x[3]))
                .checker(|x, _| !collide(&x[1], &x[3]))
                .eager(cfg.eager_tests)
                .finish()?,
        );
    }
    Ok(prob)
}

fn pose_stream<C: Cost>(v: &Vocabulary, limit: i64) -> Result<StreamSchema<C>> {
    StreamSchema::build("Pose-U", &[], &["P"])
        .out(v.is_pose, args!["P"])
        .generator(move |_| from_iter((0..limit).map(|i| vec![pose(i)])))
        .finish()
}
