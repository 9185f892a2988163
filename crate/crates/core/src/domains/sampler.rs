use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::Payload;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SamplerKind {
    /// Seeded uniform pseudo-random numbers.
    Uniform,
    /// Halton low-discrepancy sequence with a seeded random rotation.
    Halton,
}

/// Van der Corput radical inverse of `i` in `base`.
pub fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic seed for one stream instance.
pub fn instance_seed(seed: u64, stream: &str, inputs: &[Payload]) -> u64 {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    stream.hash(&mut h);
    inputs.hash(&mut h);
    h.finish()
}

/// Sequence of points in the unit square.
pub struct UnitSampler {
    kind: SamplerKind,
    rng: ChaCha8Rng,
    index: u64,
    rotation: [f64; 2],
}

impl UnitSampler {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rotation = [rng.gen::<f64>(), rng.gen::<f64>()];
        UnitSampler {
            kind,
            rng,
            index: 0,
            rotation,
        }
    }

    /// Next point; both coordinates lie in `[0, 1)`.
    pub fn next_pair(&mut self) -> (f64, f64) {
        self.index += 1;
        match self.kind {
            SamplerKind::Uniform => (self.rng.gen(), self.rng.gen()),
            SamplerKind::Halton => (
                (radical_inverse(2, self.index) + self.rotation[0]).fract(),
                (radical_inverse(3, self.index) + self.rotation[1]).fract(),
            ),
        }
    }

    pub fn next_unit(&mut self) -> f64 {
        self.next_pair().0
    }
}
