//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Geometry, transport and sampling are written against this trait. The
/// numerical tolerances quoted throughout the crate (1e-9 membership,
/// 1e-12 eigenvalue floor) are the `f64` values; `f32` gets looser ones
/// scaled from its machine epsilon.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into this scalar.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Membership / tangency tolerance.
    fn membership_tol() -> Self;

    /// Smallest admissible SPD eigenvalue.
    fn eigen_floor() -> Self;

    /// Threshold under which a distance counts as zero.
    fn zero_dist() -> Self;
}

impl Real for f64 {
    fn membership_tol() -> Self {
        1e-9
    }
    fn eigen_floor() -> Self {
        1e-12
    }
    fn zero_dist() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn membership_tol() -> Self {
        1e-5
    }
    fn eigen_floor() -> Self {
        1e-12
    }
    fn zero_dist() -> Self {
        1e-6
    }
}
