//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All geometry, formulas and estimators are written against [`Scalar`] so
//! the same code runs in `f32` or `f64`. Counting is still exact: cell
//! indices are integers, and dyadic scales are applied by multiplying with
//! an exact power of two.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Bit pattern used for exact duplicate detection. `-0.0` maps to `+0.0`.
    fn exact_bits(self) -> u64;
}

impl Scalar for f32 {
    fn exact_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            u64::from(self.to_bits())
        }
    }
}

impl Scalar for f64 {
    fn exact_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// `2^k` as an exact scalar (for the ranges used by dyadic meshes).
#[inline]
pub fn pow2<T: Scalar>(k: i32) -> T {
    lit::<T>(2.0).powi(k)
}
