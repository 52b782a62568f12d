//! Scalar abstraction for vertex weights.
//!
//! Everything combinatorial (graphs, solvers, LP relaxation, metrics) is
//! generic over [`Weight`], so the same code runs on `f64`, `f32` and exact
//! rationals. The quantum emulator is physics and stays on `f64`.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};

/// A nonnegative additive weight.
pub trait Weight:
    Copy
    + Debug
    + Display
    + PartialOrd
    + Num
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Finite and nonnegative.
    fn is_admissible(&self) -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(self) -> Self {
        self / Self::two()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion used for reporting.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion from a literal; panics only on values no weight type can hold.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("weight literal out of range")
    }
}

macro_rules! float_weight {
    ($($t:ty)*) => ($(
        impl Weight for $t {
            fn is_admissible(&self) -> bool {
                self.is_finite() && *self >= 0.0
            }
        }
    )*)
}

float_weight!(f32 f64);

macro_rules! ratio_weight {
    ($($t:ty)*) => ($(
        impl Weight for Ratio<$t> {
            fn is_admissible(&self) -> bool {
                *self.denom() != 0 && *self >= Ratio::from_integer(0)
            }
        }
    )*)
}

ratio_weight!(i32 i64);

/// Sum of an iterator of weights.
pub fn total<W: Weight>(it: impl IntoIterator<Item = W>) -> W {
    it.into_iter().fold(W::zero(), |acc, w| acc + w)
}
