use crate::args;
use crate::model::{AxiomSchema, ObjectRef, OperatorSchema, PredicateId, PredicateKind, ProblemInstance};
use crate::{Cost, Result};

/// Predicates of the one-dimensional pick-and-place domain.
#[derive(Copy, Clone, Debug)]
pub struct Vocabulary {
    pub is_block: PredicateId,
    pub is_pose: PredicateId,
    pub is_conf: PredicateId,
    pub is_kin: PredicateId,
    pub is_collision_free: PredicateId,
    pub at_pose: PredicateId,
    pub at_conf: PredicateId,
    pub holding: PredicateId,
    pub hand_empty: PredicateId,
    pub safe: PredicateId,
}

impl Vocabulary {
    pub fn declare<C>(p: &mut ProblemInstance<C>) -> Result<Self> {
        use PredicateKind::*;
        Ok(Vocabulary {
            is_block: p.declare("IsBlock", 1, Static)?,
            is_pose: p.declare("IsPose", 1, Static)?,
            is_conf: p.declare("IsConf", 1, Static)?,
            is_kin: p.declare("IsKin", 2, Static)?,
            is_collision_free: p.declare("IsCollisionFree", 4, Static)?,
            at_pose: p.declare("AtPose", 2, Fluent)?,
            at_conf: p.declare("AtConf", 1, Fluent)?,
            holding: p.declare("Holding", 1, Fluent)?,
            hand_empty: p.declare("HandEmpty", 0, Fluent)?,
            safe: p.declare("Safe", 3, Derived)?,
        })
    }
}

/// Adds Move, Pick, Place and the two Safe axioms. Place requires
/// `Safe(b, B, P)` for every block `b` in `blocks`.
///
/// The held block is only ever safe with respect to itself: with one hand,
/// `Holding(b)` and `Holding(B)` both hold only when `b = B`, so this is
/// equivalent to deriving `Safe(b, B, P)` from `Holding(b)` for any `B`, but
/// gives delete-relaxation heuristics far better guidance.
pub fn add_schemas<C: Cost>(p: &mut ProblemInstance<C>, v: &Vocabulary, blocks: &[ObjectRef]) -> Result<()> {
    p.operators.push(
        OperatorSchema::build("Move", &["Q1", "Q2"])
            .stat(v.is_conf, args!["Q1"])
            .stat(v.is_conf, args!["Q2"])
            .pre(v.at_conf, args!["Q1"])
            .add(v.at_conf, args!["Q2"])
            .del(v.at_conf, args!["Q1"])
            .finish()?,
    );
    p.operators.push(
        OperatorSchema::build("Pick", &["B", "P", "Q"])
            .stat(v.is_block, args!["B"])
            .stat(v.is_pose, args!["P"])
            .stat(v.is_conf, args!["Q"])
            .stat(v.is_kin, args!["P", "Q"])
            .pre(v.at_pose, args!["B", "P"])
            .pre(v.hand_empty, args![])
            .pre(v.at_conf, args!["Q"])
            .add(v.holding, args!["B"])
            .del(v.at_pose, args!["B", "P"])
            .del(v.hand_empty, args![])
            .finish()?,
    );
    let mut place = OperatorSchema::build("Place", &["B", "P", "Q"])
        .stat(v.is_block, args!["B"])
        .stat(v.is_pose, args!["P"])
        .stat(v.is_conf, args!["Q"])
        .stat(v.is_kin, args!["P", "Q"])
        .pre(v.holding, args!["B"])
        .pre(v.at_conf, args!["Q"]);
    for &b in blocks {
        place = place.pre(v.safe, args![b, "B", "P"]);
    }
    p.operators.push(
        place
            .add(v.at_pose, args!["B", "P"])
            .add(v.hand_empty, args![])
            .del(v.holding, args!["B"])
            .finish()?,
    );
    p.axioms.push(
        AxiomSchema::build("SafeAxiom", &["B1", "P1", "B2", "P2"])
            .stat(v.is_block, args!["B1"])
            .stat(v.is_pose, args!["P1"])
            .stat(v.is_block, args!["B2"])
            .stat(v.is_pose, args!["P2"])
            .stat(v.is_collision_free, args!["B1", "P1", "B2", "P2"])
            .pre(v.at_pose, args!["B1", "P1"])
            .head(v.safe, args!["B1", "B2", "P2"])
            .finish()?,
    );
    p.axioms.push(
        AxiomSchema::build("SafeAxiomH", &["B", "P"])
            .stat(v.is_block, args!["B"])
            .stat(v.is_pose, args!["P"])
            .pre(v.holding, args!["B"])
            .head(v.safe, args!["B", "B", "P"])
            .finish()?,
    );
    Ok(())
}

/// Block names `A`, `B`, ... then `A1`, `B1`, ... past the alphabet.
pub fn block_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}
