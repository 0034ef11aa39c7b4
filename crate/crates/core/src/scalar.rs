//! Scalar abstraction for the real-valued kinematics, LP and scheduling code.
//!
//! Everything that only needs real arithmetic is written against [`Real`], so
//! the same code runs in `f32` and `f64`. Tolerances live on the trait because
//! a pivot threshold that is sensible in double precision is pure noise in
//! single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

pub trait Real:
    Float + NumAssign + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Slack allowed on bi-stochastic row/column sums and negativity.
    fn weight_tol() -> Self;
    /// Smallest pivot magnitude the simplex will accept.
    fn pivot_tol() -> Self;
    /// Entries at or below this count as structural zeros (matching support).
    fn zero_tol() -> Self;
    /// Slack on unit-norm and unit-sum constraints.
    fn norm_tol() -> Self;
    /// Tolerance for reconstruction and unitarity checks.
    fn check_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Real for f64 {
    fn weight_tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-10
    }
    fn zero_tol() -> Self {
        1e-12
    }
    fn norm_tol() -> Self {
        1e-12
    }
    fn check_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn weight_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-5
    }
    fn zero_tol() -> Self {
        1e-6
    }
    fn norm_tol() -> Self {
        1e-5
    }
    fn check_tol() -> Self {
        1e-4
    }
}
