//! Descriptive accuracy of fitted values against a benchmark.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::{mean, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitMetrics<T> {
    pub r2: T,
    pub rmse: T,
    pub bench_r2: T,
    pub bench_rmse: T,
    /// `r2 - bench_r2`.
    pub delta_r2: T,
    /// `100 (rmse / bench_rmse - 1)`.
    pub pct_delta_rmse: T,
}

fn r2_rmse<T: Real>(y: &[T], fitted: &[T]) -> Result<(T, T)> {
    let m = mean(y);
    let sst: T = y.iter().map(|&v| (v - m) * (v - m)).sum();
    if sst == T::zero() {
        return Err(CoreError::ZeroVariance("target"));
    }
    let ssr: T = y.iter().zip(fitted).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok((T::one() - ssr / sst, (ssr / T::from_usize_lossy(y.len())).sqrt()))
}

pub fn fit_metrics<T: Real>(y: &[T], fitted: &[T], bench_fitted: &[T]) -> Result<FitMetrics<T>> {
    if y.len() != fitted.len() || y.len() != bench_fitted.len() {
        return Err(CoreError::Dimension(format!(
            "lengths y={}, fitted={}, benchmark={}",
            y.len(),
            fitted.len(),
            bench_fitted.len()
        )));
    }
    if y.is_empty() {
        return Err(CoreError::TooFewObservations { needed: 1, have: 0 });
    }
    let (r2, rmse) = r2_rmse(y, fitted)?;
    let (bench_r2, bench_rmse) = r2_rmse(y, bench_fitted)?;
    let pct = if bench_rmse > T::zero() {
        T::lit(100.0) * (rmse / bench_rmse - T::one())
    } else if rmse == T::zero() {
        T::zero()
    } else {
        T::infinity()
    };
    Ok(FitMetrics { r2, rmse, bench_r2, bench_rmse, delta_r2: r2 - bench_r2, pct_delta_rmse: pct })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_mean_fits() {
        let y = [1.0, 3.0, 2.0, 6.0];
        let m = [3.0; 4];
        let fm = fit_metrics(&y, &y, &m).unwrap();
        assert_eq!(fm.r2, 1.0);
        assert_eq!(fm.rmse, 0.0);
        assert_eq!(fm.bench_r2, 0.0);
        assert_eq!(fm.pct_delta_rmse, -100.0);
    }

    #[test]
    fn zero_variance_target() {
        assert!(matches!(fit_metrics(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]), Err(CoreError::ZeroVariance(_))));
    }
}
