//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All models, the dataset container and the statistics are generic over
//! [`Scalar`], which is implemented for `f32` and `f64`. The pipeline and
//! CLI run in `f64`; the aliases in the crate root name those instances.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar usable by the models and the selection protocol.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + FromStr
    + 'static
{
    /// Converts an `f64` constant into `Self`, rounding to nearest.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Lossless widening to `f64` (exact for both implementors).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }

    /// Square root of the machine epsilon of this type.
    fn sqrt_epsilon() -> Self {
        Self::epsilon().sqrt()
    }

    /// Bit pattern used for exact-equality hashing (duplicate detection).
    fn bits(self) -> u64;
}

impl Scalar for f32 {
    fn bits(self) -> u64 {
        u64::from(self.to_bits())
    }
}

impl Scalar for f64 {
    fn bits(self) -> u64 {
        self.to_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_epsilon_matches_type() {
        assert_eq!(f64::sqrt_epsilon(), f64::EPSILON.sqrt());
        assert_eq!(f32::sqrt_epsilon(), f32::EPSILON.sqrt());
    }

    #[test]
    fn bits_distinguish_signed_zero() {
        assert_ne!(0.0f64.bits(), (-0.0f64).bits());
        assert_eq!(1.5f32.bits(), 1.5f32.bits());
    }
}
