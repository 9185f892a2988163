use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::Add;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

/// Scalar used for action costs, stream meta-costs and heuristic values.
///
/// Costs must be non-negative. Implemented for the unsigned integers, the
/// IEEE floats and exact rationals.
pub trait Cost:
    Copy + Debug + Display + PartialOrd + Zero + One + Add<Output = Self> + Send + Sync + 'static
{
    /// Total order used by priority queues. Incomparable values (NaN) compare equal.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn to_f64(&self) -> f64;

    fn is_non_negative(&self) -> bool {
        *self >= Self::zero()
    }

    fn max_of(self, other: Self) -> Self {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

macro_rules! primitive_cost {
    ($($t:ty),*) => {$(
        impl Cost for $t {
            fn to_f64(&self) -> f64 {
                ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
            }
        }
    )*};
}

primitive_cost!(u32, u64, f32, f64);

impl Cost for Ratio<u64> {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Cost for Ratio<u32> {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_total_order() {
        let a = Ratio::new(1u64, 3);
        let b = Ratio::new(2u64, 5);
        assert_eq!(a.total_cmp(&b), Ordering::Less);
        assert_eq!(a.max_of(b), b);
        assert!((Cost::to_f64(&(a + b)) - 11.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn float_nan_is_not_non_negative() {
        assert!(!f64::NAN.is_non_negative());
        assert!(0.0f64.is_non_negative());
    }
}
