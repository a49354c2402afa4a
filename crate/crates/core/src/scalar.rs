//! Floating-point abstraction shared by every engine.
//!
//! All numerical code is written against [`Scalar`], implemented for `f32`
//! and `f64`. Tolerances are quoted for `f64` and rescaled by the ratio of
//! machine epsilons, so a check written as `T::tol(1e-12)` keeps the same
//! meaning (a fixed number of ulps) for single precision.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// An absolute tolerance quoted for `f64`, rescaled to this precision.
    #[inline]
    fn tol(x: f64) -> Self {
        let ratio = Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        Self::lit(x * ratio)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Tolerances used across the crate, quoted for `f64`.
pub mod tol {
    /// Per-slice normalization of probability sequences and wave fields.
    pub const NORM: f64 = 1e-12;
    /// Normalization accepted when ingesting external data before renormalizing.
    pub const INGEST: f64 = 1e-9;
    /// Floating-point noise below zero that is clamped rather than rejected.
    pub const CLAMP: f64 = 1e-12;
    /// Default additive slack of the feasibility bound |J| <= rho + tol.
    pub const FEASIBILITY: f64 = 1e-10;
    /// Agreement required between the two flux recursions.
    pub const FLUX_PASSES: f64 = 1e-10;
    /// Slack for jump probabilities outside [0, 1].
    pub const PROBABILITY: f64 = 1e-10;
    /// Unit-norm defect of a synthesized (cos, sin) pair that is an error.
    pub const UNIT_NORM: f64 = 1e-8;
    /// Incoming amplitude or mass tolerated at an undefined schedule site.
    pub const COVERAGE: f64 = 1e-12;
    /// Below this |sin theta| the closed-form kernel degenerates.
    pub const DEGENERATE_SIN: f64 = 1e-9;
}
