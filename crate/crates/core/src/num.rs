//! Scalar abstractions: the exact counters used for run counting and the
//! floating-point types used for failure-probability estimates.

use std::fmt::{Debug, Display};

use num_traits::{CheckedAdd, Float, FromPrimitive, One, ToPrimitive, Zero};

/// An exact nonnegative counter. [`num_bigint::BigUint`] never overflows;
/// the fixed-width integers report overflow through `checked_add`.
pub trait PathCount:
    Clone + Debug + Display + Ord + Zero + One + CheckedAdd + ToPrimitive + Send + Sync
{
}

impl<T> PathCount for T where
    T: Clone + Debug + Display + Ord + Zero + One + CheckedAdd + ToPrimitive + Send + Sync
{
}

/// Floating-point type for proportions and interval bounds (`f32`/`f64`).
pub trait Probability: Float + FromPrimitive + Debug + Display + Send + Sync {}

impl<T> Probability for T where T: Float + FromPrimitive + Debug + Display + Send + Sync {}
