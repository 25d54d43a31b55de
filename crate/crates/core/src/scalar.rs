//! Numeric abstraction the engine is generic over.
//!
//! Review responsibilities are quotients of small integers, so the exact
//! instantiation ([`crate::Rational`]) is the one the ledger and CLI use.
//! Floating-point instantiations exist for quick approximate work and for
//! cross-checking; they do not satisfy the exact conservation identities.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, ToPrimitive};

/// A number type that review counts and per-author shares can live in.
pub trait Scalar:
    Num + Clone + Debug + PartialOrd + Neg<Output = Self> + Sum + Send + Sync + 'static
{
    /// Whether arithmetic in this type is exact (no rounding).
    const EXACT: bool;

    /// Lift a non-negative count into the scalar type.
    fn from_count(n: u64) -> Self;

    /// Nearest `f64`, for display and approximate comparisons.
    fn as_f64(&self) -> f64;

    /// `count / parts`. `parts` must be non-zero.
    fn share(count: u64, parts: usize) -> Self {
        Self::from_count(count) / Self::from_count(parts as u64)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

// Fixed-width ratios overflow (and panic) once enough distinct author counts
// are summed; fine for small ledgers, use BigRational otherwise.
macro_rules! impl_fixed_ratio {
    ($($t:ty)*) => ($(
        impl Scalar for Ratio<$t> {
            const EXACT: bool = true;

            fn from_count(n: u64) -> Self {
                Ratio::from_integer(<$t>::try_from(n).expect("count exceeds ratio range"))
            }

            fn as_f64(&self) -> f64 {
                ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
            }
        }
    )*)
}

impl_fixed_ratio!(i64 i128);

macro_rules! impl_float {
    ($($t:ty)*) => ($(
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_count(n: u64) -> Self {
                n as $t
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }
        }
    )*)
}

impl_float!(f32 f64);
