//! Standard normal distribution helpers.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::scalar::Real;

fn standard() -> Normal {
    Normal::standard()
}

pub fn normal_cdf<T: Real>(x: T) -> T {
    T::lit(standard().cdf(x.to_f64_lossy()))
}

/// `Phi^{-1}(p)` for `p` in `(0, 1)`.
pub fn normal_quantile<T: Real>(p: T) -> T {
    T::lit(standard().inverse_cdf(p.to_f64_lossy()))
}

/// Two-sided p-value `2 (1 - Phi(|t|))`, computed on the upper tail to
/// avoid cancellation for large `|t|`.
pub fn two_sided_p<T: Real>(t: T) -> T {
    if t.is_nan() {
        return T::one();
    }
    let upper = standard().sf(t.abs().to_f64_lossy());
    T::lit((2.0 * upper).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_quantiles() {
        assert!((normal_quantile(0.975_f64) - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((normal_cdf(0.0_f64) - 0.5).abs() < 1e-15);
        assert_eq!(two_sided_p(f64::INFINITY), 0.0);
        assert!((two_sided_p(1.959_963_984_540_054_f64) - 0.05).abs() < 1e-9);
    }
}
