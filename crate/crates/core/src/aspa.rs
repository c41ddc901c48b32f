//! Multi-horizon average superior predictive ability (aSPA) test with a
//! circular moving-block bootstrap.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::hac::{bartlett_lag_rule, long_run_variance};
use crate::linalg::Matrix;
use crate::rng::stream;
use crate::scalar::{mean, Real};

/// Loss differentials `benchmark loss - alternative loss`, one row per date
/// and one column per horizon. Positive values favour the alternative.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPanel<T> {
    pub horizons: Vec<usize>,
    pub dates: Vec<String>,
    pub d: Matrix<T>,
}

impl<T: Real> LossPanel<T> {
    pub fn new(horizons: Vec<usize>, dates: Vec<String>, d: Matrix<T>) -> Result<Self> {
        if d.nrows() != dates.len() || d.ncols() != horizons.len() {
            return Err(CoreError::Dimension(format!(
                "panel is {}x{} but has {} dates and {} horizons",
                d.nrows(),
                d.ncols(),
                dates.len(),
                horizons.len()
            )));
        }
        if d.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidArgument("loss panel has missing or non-finite cells".into()));
        }
        Ok(Self { horizons, dates, d })
    }

    /// Builds the panel from aligned benchmark and alternative loss matrices.
    pub fn from_losses(horizons: Vec<usize>, dates: Vec<String>, bench: &Matrix<T>, alt: &Matrix<T>) -> Result<Self> {
        if bench.nrows() != alt.nrows() || bench.ncols() != alt.ncols() {
            return Err(CoreError::Dimension("benchmark and alternative losses differ in shape".into()));
        }
        let d: Vec<T> = bench.as_slice().iter().zip(alt.as_slice()).map(|(&b, &a)| b - a).collect();
        Self::new(horizons, dates, Matrix::from_row_major(bench.nrows(), bench.ncols(), d))
    }

    pub fn n_dates(&self) -> usize {
        self.d.nrows()
    }

    /// Cross-horizon average differential per date.
    pub fn average_differential(&self) -> Vec<T> {
        let h = T::from_usize_lossy(self.d.ncols());
        (0..self.d.nrows()).map(|t| self.d.row(t).iter().copied().sum::<T>() / h).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub block_len: Option<usize>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport<T> {
    pub statistic: T,
    pub p_value: T,
    pub method: String,
    pub config: TestConfig,
    /// Set when every differential is exactly zero.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspaOptions {
    pub block_len: usize,
    pub replications: usize,
    pub seed: u64,
}

impl Default for AspaOptions {
    fn default() -> Self {
        Self { block_len: 3, replications: 999, seed: 0 }
    }
}

/// Indices of a circular moving-block resample of length `n`.
pub fn circular_block_indices<R: Rng + ?Sized>(n: usize, block_len: usize, rng: &mut R) -> Vec<usize> {
    let mut idx = Vec::with_capacity(n + block_len);
    while idx.len() < n {
        let start = rng.random_range(0..n);
        idx.extend((0..block_len).map(|i| (start + i) % n));
    }
    idx.truncate(n);
    idx
}

/// `sqrt(n) (mean(x*) - centre) / omega*`, where `omega*^2` is built from the
/// centred sums over the resampled blocks.
fn block_statistic<T: Real>(xs: &[T], block_len: usize, centre: T) -> T {
    let n = xs.len();
    let m = mean(xs);
    let ss: T = xs
        .chunks(block_len)
        .map(|b| {
            let s: T = b.iter().map(|&v| v - m).sum();
            s * s
        })
        .sum();
    let omega = (ss / T::from_usize_lossy(n)).sqrt();
    studentize(m - centre, omega, n)
}

fn studentize<T: Real>(num: T, omega: T, n: usize) -> T {
    let root_n = T::from_usize_lossy(n).sqrt();
    if omega > T::zero() {
        root_n * num / omega
    } else if num == T::zero() {
        T::zero()
    } else {
        num.signum() * T::infinity()
    }
}

pub fn aspa_test<T: Real>(panel: &LossPanel<T>, opts: &AspaOptions) -> Result<TestReport<T>> {
    let n = panel.n_dates();
    if opts.block_len == 0 || opts.replications == 0 {
        return Err(CoreError::InvalidArgument("block length and replications must be positive".into()));
    }
    if n < 2 * opts.block_len {
        return Err(CoreError::TooFewObservations { needed: 2 * opts.block_len, have: n });
    }
    let config = TestConfig {
        block_len: Some(opts.block_len),
        replications: Some(opts.replications),
        seed: Some(opts.seed),
        window: None,
    };
    let method = "aspa".to_string();
    if panel.d.as_slice().iter().all(|&v| v == T::zero()) {
        return Ok(TestReport { statistic: T::zero(), p_value: T::one(), method, config, degenerate: true });
    }

    let avg = panel.average_differential();
    let centre = mean(&avg);
    let omega = long_run_variance(&avg, bartlett_lag_rule(n)).max(T::zero()).sqrt();
    let statistic = studentize(centre, omega, n);

    let exceed: usize = (0..opts.replications)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(opts.seed, b as u64);
            let idx = circular_block_indices(n, opts.block_len, &mut rng);
            let xs: Vec<T> = idx.iter().map(|&i| avg[i]).collect();
            usize::from(block_statistic(&xs, opts.block_len, centre) >= statistic)
        })
        .sum();
    let p_value = T::from_usize_lossy(exceed) / T::from_usize_lossy(opts.replications);
    Ok(TestReport { statistic, p_value, method, config, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(rows: &[Vec<f64>]) -> LossPanel<f64> {
        let h = rows[0].len();
        LossPanel::new((1..=h).collect(), (0..rows.len()).map(|i| i.to_string()).collect(), Matrix::from_rows(rows))
            .unwrap()
    }

    #[test]
    fn zero_differentials_are_degenerate() {
        let p = panel(&vec![vec![0.0, 0.0]; 12]);
        let r = aspa_test(&p, &AspaOptions::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn too_few_dates() {
        let p = panel(&vec![vec![1.0]; 5]);
        assert!(matches!(aspa_test(&p, &AspaOptions::default()), Err(CoreError::TooFewObservations { .. })));
    }

    #[test]
    fn reproducible_and_directional() {
        let rows: Vec<Vec<f64>> = (0..60).map(|t| vec![1.0 + ((t * 7) % 5) as f64 * 0.1, 0.8]).collect();
        let p = panel(&rows);
        let opts = AspaOptions { seed: 11, ..Default::default() };
        let a = aspa_test(&p, &opts).unwrap();
        let b = aspa_test(&p, &opts).unwrap();
        assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
        assert!(a.p_value < 0.01);
    }

    #[test]
    fn block_indices_wrap() {
        let mut rng = stream(3, 0);
        let idx = circular_block_indices(10, 3, &mut rng);
        assert_eq!(idx.len(), 10);
        for w in idx.chunks(3) {
            for k in 1..w.len() {
                assert_eq!(w[k], (w[k - 1] + 1) % 10);
            }
        }
    }
}
