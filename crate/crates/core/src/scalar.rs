//! Numeric abstractions shared by the channel, scheduling and optimization code.
//!
//! `Real` covers the floating-point math (rates, gains, distances, solver
//! iterates). `Amount` covers queued data, which is real-valued bits in normal
//! runs and whole bits in exact-conservation runs.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A non-negative quantity of data bits held in a queue.
///
/// Implemented for `f64` (fluid bits) and `u64` (whole bits, exact arithmetic).
pub trait Amount: Copy + PartialOrd + Default + Debug + Display + Send + Sync + 'static {
    const ZERO: Self;

    /// Largest representable amount not exceeding `x` (`x` is clamped at zero).
    fn from_f64_floor(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn add(self, other: Self) -> Self;
    /// `self - other`, or `None` when the result would be negative.
    fn checked_sub(self, other: Self) -> Option<Self>;

    #[inline]
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn is_zero(self) -> bool {
        !(self > Self::ZERO)
    }

    /// `self - other` clamped at zero.
    #[inline]
    fn saturating_sub(self, other: Self) -> Self {
        self.checked_sub(other).unwrap_or(Self::ZERO)
    }
}

impl Amount for f64 {
    const ZERO: Self = 0.0;

    #[inline]
    fn from_f64_floor(x: f64) -> Self {
        if x.is_nan() {
            0.0
        } else {
            x.max(0.0)
        }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline]
    fn add(self, other: Self) -> Self {
        self + other
    }

    #[inline]
    fn checked_sub(self, other: Self) -> Option<Self> {
        let d = self - other;
        // rounding residue below a nanobit-scale slack is snapped to zero
        let slack = 1e-9 * self.abs().max(other.abs()).max(1.0);
        if d > slack {
            Some(d)
        } else if d > -slack {
            Some(0.0)
        } else {
            None
        }
    }
}

impl Amount for u64 {
    const ZERO: Self = 0;

    #[inline]
    fn from_f64_floor(x: f64) -> Self {
        if x.is_nan() || x <= 0.0 {
            0
        } else if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x.floor() as u64
        }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn add(self, other: Self) -> Self {
        self.checked_add(other).expect("bit count overflow")
    }

    #[inline]
    fn checked_sub(self, other: Self) -> Option<Self> {
        u64::checked_sub(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_floor_and_clamp() {
        assert_eq!(<u64 as Amount>::from_f64_floor(2.9), 2);
        assert_eq!(<u64 as Amount>::from_f64_floor(-3.0), 0);
        assert_eq!(<u64 as Amount>::from_f64_floor(f64::NAN), 0);
        assert_eq!(<u64 as Amount>::checked_sub(3, 4), None);
    }

    #[test]
    fn fluid_sub_absorbs_rounding_residue() {
        let a = 0.1 + 0.2;
        assert_eq!(Amount::checked_sub(0.3, a), Some(0.0));
        assert_eq!(Amount::checked_sub(1.0, 2.0), None);
    }

    #[test]
    fn lit_round_trips() {
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::lit(1e-7).as_f64(), 1e-7);
    }
}
