//! Rolling-window relative-accuracy (fluctuation) test.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::hac::{bartlett_lag_rule, long_run_variance};
use crate::scalar::{mean, Real};

/// Smallest window for which the HAC variance is computed.
pub const MIN_WINDOW: usize = 8;

/// One-sided 10% critical values keyed by `mu = m / n`.
/// Generated by `examples/fluctuation_table.rs` (defaults: 40000 paths,
/// 10000 grid steps, seed 20100101).
pub const CRITICAL_VALUES_10: [(f64, f64); 10] = [
    (0.05, 3.274),
    (0.10, 3.031),
    (0.15, 2.873),
    (0.20, 2.743),
    (0.25, 2.632),
    (0.30, 2.536),
    (0.35, 2.45),
    (0.40, 2.373),
    (0.45, 2.288),
    (0.50, 2.215),
];

/// Linear interpolation in the critical-value table.
pub fn critical_value(mu: f64) -> Result<f64> {
    let (lo, hi) = (CRITICAL_VALUES_10[0].0, CRITICAL_VALUES_10[CRITICAL_VALUES_10.len() - 1].0);
    if !(mu >= lo - 1e-12 && mu <= hi + 1e-12) {
        return Err(CoreError::InvalidArgument(format!("window share {mu} outside tabulated [{lo}, {hi}]")));
    }
    let mu = mu.clamp(lo, hi);
    for w in CRITICAL_VALUES_10.windows(2) {
        let ((m0, c0), (m1, c1)) = (w[0], w[1]);
        if mu <= m1 {
            return Ok(c0 + (c1 - c0) * (mu - m0) / (m1 - m0));
        }
    }
    Ok(CRITICAL_VALUES_10[CRITICAL_VALUES_10.len() - 1].1)
}

/// Default window `round(0.10 n)`.
pub fn default_window(n: usize) -> usize {
    (0.1 * n as f64).round() as usize
}

/// Diebold–Mariano statistic `sqrt(n) mean(d) / sigma_HAC` with the Bartlett
/// lag rule applied to the slice length.
pub fn dm_statistic<T: Real>(d: &[T]) -> T {
    let n = d.len();
    let m = mean(d);
    let s = long_run_variance(d, bartlett_lag_rule(n)).max(T::zero()).sqrt();
    let root_n = T::from_usize_lossy(n).sqrt();
    if s > T::zero() {
        root_n * m / s
    } else if m == T::zero() {
        T::zero()
    } else {
        m.signum() * T::infinity()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationResult<T> {
    pub window: usize,
    pub mu: f64,
    /// Index of the middle observation of each window.
    pub midpoints: Vec<usize>,
    pub statistics: Vec<T>,
    pub critical_value: T,
}

impl<T: Real> FluctuationResult<T> {
    pub fn max_statistic(&self) -> T {
        self.statistics.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn rejects(&self) -> bool {
        self.max_statistic() > self.critical_value
    }
}

/// How each window's mean differential is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Studentization {
    /// Each window's own HAC variance: the statistic is the DM statistic of
    /// the slice.
    #[default]
    Window,
    /// One HAC variance from the whole series, as in Giacomini and Rossi.
    /// Closer to nominal size when windows are short.
    FullSample,
}

pub fn fluctuation_test<T: Real>(d: &[T], window: usize) -> Result<FluctuationResult<T>> {
    fluctuation_test_with(d, window, Studentization::Window)
}

pub fn fluctuation_test_with<T: Real>(
    d: &[T],
    window: usize,
    studentization: Studentization,
) -> Result<FluctuationResult<T>> {
    let n = d.len();
    if window < MIN_WINDOW {
        return Err(CoreError::InvalidArgument(format!("window {window} below minimum {MIN_WINDOW}")));
    }
    if window >= n {
        return Err(CoreError::TooFewObservations { needed: window + 1, have: n });
    }
    let mu = window as f64 / n as f64;
    let cv = critical_value(mu)?;
    let statistics: Vec<T> = match studentization {
        Studentization::Window => d.windows(window).map(dm_statistic).collect(),
        Studentization::FullSample => {
            let sigma = long_run_variance(d, bartlett_lag_rule(n)).max(T::zero()).sqrt();
            let root_m = T::from_usize_lossy(window).sqrt();
            d.windows(window)
                .map(|w| {
                    let m = mean(w);
                    if sigma > T::zero() {
                        root_m * m / sigma
                    } else {
                        m.signum() * T::infinity()
                    }
                })
                .collect()
        }
    };
    let midpoints = (0..statistics.len()).map(|j| j + (window - 1) / 2).collect();
    Ok(FluctuationResult { window, mu, midpoints, statistics, critical_value: T::lit(cv) })
}
