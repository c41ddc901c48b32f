//! Floating-point abstraction shared by every estimator in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar: `f32` or `f64`.
///
/// Numerical tolerances are expressed through [`Real::tol`], which never
/// returns a value tighter than a small multiple of machine epsilon, so the
/// same code converges at single precision with proportionally looser
/// criteria.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// `requested` clamped from below by `1000 * epsilon`.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(1000.0);
        Self::lit(requested).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Arithmetic mean; zero for an empty slice.
pub fn mean<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    xs.iter().copied().sum::<T>() / T::from_usize_lossy(xs.len())
}

/// Population variance (divides by `n`).
pub fn variance<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::from_usize_lossy(xs.len())
}

/// Empirical quantile using the inverse of the empirical CDF
/// (smallest order statistic with cumulative share `>= tau`).
pub fn empirical_quantile<T: Real>(xs: &[T], tau: T) -> T {
    assert!(!xs.is_empty(), "quantile of empty sample");
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    let n = T::from_usize_lossy(v.len());
    let k = (tau * n).ceil().to_usize().unwrap_or(1).clamp(1, v.len());
    v[k - 1]
}

/// Interquartile range on the empirical CDF.
pub fn iqr<T: Real>(xs: &[T]) -> T {
    empirical_quantile(xs, T::lit(0.75)) - empirical_quantile(xs, T::lit(0.25))
}
