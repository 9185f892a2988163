use num_traits::Float;

/// Gripper of width `delta` grasping a unit-width block.
///
/// A configuration `q` can grasp a block at `p` when the block lies entirely
/// under the gripper: `p + 1/2 ≤ q + δ/2` and `p − 1/2 ≥ q − δ/2`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct KinematicsRule<F> {
    pub delta: F,
}

impl<F: Float> KinematicsRule<F> {
    pub fn new(delta: F) -> Self {
        KinematicsRule { delta }
    }

    pub fn valid(&self, p: F, q: F) -> bool {
        kin_valid(p, q, self.delta)
    }

    /// Largest `|q − p|` that still grasps.
    pub fn half_band(&self) -> F {
        let two = F::one() + F::one();
        ((self.delta - F::one()) / two).max(F::zero())
    }
}

pub fn kin_valid<F: Float>(p: F, q: F, delta: F) -> bool {
    let two = F::one() + F::one();
    let half = F::one() / two;
    p + half <= q + delta / two && p - half >= q - delta / two
}

/// Unit-width blocks at `p1` and `p2` do not overlap.
pub fn collision_free<F: Float>(p1: F, p2: F) -> bool {
    (p1 - p2).abs() >= F::one()
}
