//! Newey–West (Bartlett kernel) heteroskedasticity and autocorrelation
//! consistent variance estimation.
//!
//! ```text
//! S = Γ_0 + Σ_{l=1}^{L} (1 - l/(L+1)) (Γ_l + Γ_l')
//! ```

use crate::linalg::Matrix;
use crate::scalar::{mean, Real};

/// Lag truncation `floor(4 (n/100)^(2/9))`.
pub fn bartlett_lag_rule(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

#[inline]
pub fn bartlett_weight<T: Real>(lag: usize, max_lag: usize) -> T {
    T::one() - T::from_usize_lossy(lag) / T::from_usize_lossy(max_lag + 1)
}

/// Long-run variance of a scalar series (demeaned internally), scaled so
/// that for iid data it estimates the ordinary variance.
pub fn long_run_variance<T: Real>(x: &[T], max_lag: usize) -> T {
    let n = x.len();
    if n == 0 {
        return T::zero();
    }
    let m = mean(x);
    let d: Vec<T> = x.iter().map(|&v| v - m).collect();
    let nf = T::from_usize_lossy(n);
    let autocov = |l: usize| -> T { (l..n).map(|t| d[t] * d[t - l]).sum::<T>() / nf };
    let mut s = autocov(0);
    for l in 1..=max_lag.min(n.saturating_sub(1)) {
        s += T::lit(2.0) * bartlett_weight::<T>(l, max_lag) * autocov(l);
    }
    s
}

/// Sum-scaled score covariance `Σ_t Σ_s w_{|t-s|} u_t u_s x_t x_s'` of the
/// regression scores `x_t u_t`.
pub fn score_covariance<T: Real>(x: &Matrix<T>, u: &[T], max_lag: usize) -> Matrix<T> {
    let n = x.nrows();
    let p = x.ncols();
    let scores: Vec<Vec<T>> = (0..n).map(|t| x.row(t).iter().map(|&v| v * u[t]).collect()).collect();
    let mut s = Matrix::zeros(p, p);
    for g in &scores {
        for a in 0..p {
            for b in 0..p {
                s[(a, b)] += g[a] * g[b];
            }
        }
    }
    for l in 1..=max_lag.min(n.saturating_sub(1)) {
        let w: T = bartlett_weight(l, max_lag);
        for t in l..n {
            let (g0, g1) = (&scores[t], &scores[t - l]);
            for a in 0..p {
                for b in 0..p {
                    s[(a, b)] += w * (g0[a] * g1[b] + g1[a] * g0[b]);
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lag_rule_values() {
        assert_eq!(bartlett_lag_rule(100), 4);
        assert_eq!(bartlett_lag_rule(300), 5);
        assert_eq!(bartlett_lag_rule(40), 3);
        assert_eq!(bartlett_lag_rule(10), 2);
    }

    #[test]
    fn zero_lag_is_population_variance() {
        let x = [1.0_f64, 2.0, 3.0, 4.0];
        assert!((long_run_variance(&x, 0) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_one_lag() {
        // d = (-1, 1, -1, 1): gamma0 = 1, gamma1 = -3/4, weight 1/2.
        let x = [0.0, 2.0, 0.0, 2.0];
        let s: f64 = long_run_variance(&x, 1);
        assert!((s - (1.0 - 0.75)).abs() < 1e-15);
    }
}
