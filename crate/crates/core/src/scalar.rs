//! Scalar abstraction shared by the numeric kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar (`f32` or `f64`) underlying the complex arithmetic.
///
/// The associated tolerances are absolute: states are unit-norm and Gram
/// matrices have unit diagonal, so every quantity compared against them is
/// of order one.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Maximum `|M - M^H|` entry tolerated by the Hermitian eigensolver.
    const SYMMETRY_TOL: f64;
    /// Residual norm below which a vector is treated as lying in a span.
    const RANK_TOL: f64;
    /// Maximum Gram-matrix deviation accepted by unitary completion.
    const GRAM_TOL: f64;
    /// Allowed deviation of a state's squared norm from one.
    const NORM_TOL: f64;
    /// Most negative eigenvalue still clamped to zero by the PSD square root.
    const PSD_TOL: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const SYMMETRY_TOL: f64 = 1e-10;
    const RANK_TOL: f64 = 1e-9;
    const GRAM_TOL: f64 = 1e-8;
    const NORM_TOL: f64 = 1e-10;
    const PSD_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const SYMMETRY_TOL: f64 = 1e-5;
    const RANK_TOL: f64 = 1e-4;
    const GRAM_TOL: f64 = 1e-4;
    const NORM_TOL: f64 = 1e-5;
    const PSD_TOL: f64 = 1e-5;
}
