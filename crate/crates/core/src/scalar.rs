use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the numerical core is generic over (f32 or f64).
///
/// Besides the arithmetic bounds, each scalar carries its own default
/// tolerances so that f32 instances are not held to f64 precision.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Default comparison tolerance for order checks, budget equalities and
    /// capacity axioms.
    const TOL: f64;
    /// Tolerance for "collapsed" verdicts of the detectors.
    const COLLAPSE_TOL: f64;
    /// Breakpoints closer than this are merged into one.
    const MERGE_EPS: f64;
    /// Atoms with smaller probability are rejected.
    const MIN_PROB: f64;
    /// Allowed deviation of the raw probability sum from one before
    /// renormalisation.
    const SUM_TOL: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    fn tol() -> Self {
        Self::lit(Self::TOL)
    }

    fn collapse_tol() -> Self {
        Self::lit(Self::COLLAPSE_TOL)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOL: f64 = 1e-9;
    const COLLAPSE_TOL: f64 = 1e-7;
    const MERGE_EPS: f64 = 1e-13;
    const MIN_PROB: f64 = 1e-15;
    const SUM_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const TOL: f64 = 1e-5;
    const COLLAPSE_TOL: f64 = 1e-4;
    const MERGE_EPS: f64 = 1e-6;
    const MIN_PROB: f64 = 1e-7;
    const SUM_TOL: f64 = 1e-5;
}

/// Total order on finite scalars. Callers guarantee finiteness.
pub(crate) fn cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("finite scalar comparison")
}
