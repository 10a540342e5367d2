//! Numeric abstractions shared by the measure, feature, classifier and
//! ranking code.
//!
//! Coincidence-matrix measures only need field arithmetic, so they are
//! written against [`Scalar`] and work with exact rationals as well as
//! floats. Anything that takes a logarithm, a square root or a learning
//! step needs [`Real`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like number type: enough for ratios of weighted counts.
pub trait Scalar:
    Clone + Num + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Lossy conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Clone + Num + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// Floating-point scalar.
pub trait Real: Scalar + Float + Copy + std::iter::Sum {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in float type")
    }
}

impl<T> Real for T where T: Scalar + Float + Copy + std::iter::Sum {}
