//! Lasso by cyclic coordinate descent.
//!
//! Minimizes `(1/2n) Σ w_i (y_i - a - x_i'b)^2 + λ ||b||_1` over the
//! standardized design (weighted mean zero, weighted unit variance), with
//! the intercept `a` unpenalized. Coefficients are reported on both the
//! standardized and the original scale. Observation weights are rescaled
//! to sum to `n`.

use crate::dist::normal_quantile;
use crate::error::{CoreError, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct LassoOptions<T> {
    /// Upper bound on full coordinate sweeps.
    pub max_sweeps: usize,
    /// KKT tolerance on the standardized scale.
    pub tol: T,
    pub weights: Option<Vec<T>>,
}

impl<T: Real> Default for LassoOptions<T> {
    fn default() -> Self {
        Self { max_sweeps: 100_000, tol: T::tol(1e-7), weights: None }
    }
}

impl<T: Real> LassoOptions<T> {
    pub fn weighted(weights: Vec<T>) -> Self {
        Self { weights: Some(weights), ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct LassoFit<T> {
    pub lambda: T,
    pub intercept: T,
    /// Slopes on the original scale.
    pub coef: Vec<T>,
    /// Slopes on the standardized scale.
    pub std_coef: Vec<T>,
    pub center: Vec<T>,
    /// Weighted standard deviations; zero marks a constant column that is
    /// never selected.
    pub scale: Vec<T>,
    pub sweeps: usize,
    /// Largest KKT violation at termination (standardized scale).
    pub kkt_violation: T,
}

impl<T: Real> LassoFit<T> {
    pub fn selected(&self) -> Vec<usize> {
        self.coef.iter().enumerate().filter(|(_, &b)| b != T::zero()).map(|(j, _)| j).collect()
    }

    pub fn predict(&self, x: &Matrix<T>) -> Vec<T> {
        x.mul_vec(&self.coef).into_iter().map(|v| v + self.intercept).collect()
    }
}

/// Weighted, standardized copy of the problem.
struct Standardized<T> {
    n: T,
    w: Vec<T>,
    cols: Vec<Vec<T>>,
    center: Vec<T>,
    scale: Vec<T>,
    y_mean: T,
    y: Vec<T>,
}

fn normalized_weights<T: Real>(n: usize, weights: Option<&[T]>) -> Result<Vec<T>> {
    match weights {
        None => Ok(vec![T::one(); n]),
        Some(w) => {
            if w.len() != n {
                return Err(CoreError::Dimension(format!("{} weights for {} rows", w.len(), n)));
            }
            if w.iter().any(|&v| !(v >= T::zero()) || !v.is_finite()) {
                return Err(CoreError::InvalidArgument("weights must be finite and >= 0".into()));
            }
            let total: T = w.iter().copied().sum();
            if !(total > T::zero()) {
                return Err(CoreError::InvalidArgument("weights sum to zero".into()));
            }
            let k = T::from_usize_lossy(n) / total;
            Ok(w.iter().map(|&v| v * k).collect())
        }
    }
}

fn standardize<T: Real>(x: &Matrix<T>, y: &[T], weights: Option<&[T]>) -> Result<Standardized<T>> {
    let n = x.nrows();
    if y.len() != n {
        return Err(CoreError::Dimension(format!("y has {} rows, X has {}", y.len(), n)));
    }
    if n == 0 {
        return Err(CoreError::TooFewObservations { needed: 1, have: 0 });
    }
    let w = normalized_weights(n, weights)?;
    let nf = T::from_usize_lossy(n);
    let wmean = |v: &[T]| v.iter().zip(&w).map(|(&a, &b)| a * b).sum::<T>() / nf;
    let y_mean = wmean(y);
    let yc: Vec<T> = y.iter().map(|&v| v - y_mean).collect();
    let mut cols = Vec::with_capacity(x.ncols());
    let mut center = Vec::with_capacity(x.ncols());
    let mut scale = Vec::with_capacity(x.ncols());
    for j in 0..x.ncols() {
        let c = x.column(j);
        let m = wmean(&c);
        let var = c.iter().zip(&w).map(|(&a, &b)| b * (a - m) * (a - m)).sum::<T>() / nf;
        let sd = var.sqrt();
        // Columns that are constant up to rounding carry no information.
        let tiny = T::epsilon().sqrt() * (m.abs() + T::one());
        let sd = if sd > tiny { sd } else { T::zero() };
        let z = if sd > T::zero() { c.iter().map(|&a| (a - m) / sd).collect() } else { vec![T::zero(); n] };
        cols.push(z);
        center.push(m);
        scale.push(sd);
    }
    Ok(Standardized { n: nf, w, cols, center, scale, y_mean, y: yc })
}

#[inline]
fn soft_threshold<T: Real>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

impl<T: Real> Standardized<T> {
    fn gradient(&self, j: usize, r: &[T]) -> T {
        self.cols[j].iter().zip(&self.w).zip(r).map(|((&x, &w), &r)| x * w * r).sum::<T>() / self.n
    }

    fn residual(&self, b: &[T]) -> Vec<T> {
        let mut r = self.y.clone();
        for (j, &bj) in b.iter().enumerate() {
            if bj != T::zero() {
                for (ri, &x) in r.iter_mut().zip(&self.cols[j]) {
                    *ri -= x * bj;
                }
            }
        }
        r
    }

    fn kkt_violation(&self, b: &[T], lambda: T) -> T {
        let r = self.residual(b);
        let mut worst = T::zero();
        for j in 0..b.len() {
            if self.scale[j] == T::zero() {
                continue;
            }
            let g = self.gradient(j, &r);
            let v =
                if b[j] != T::zero() { (g - lambda * b[j].signum()).abs() } else { (g.abs() - lambda).max(T::zero()) };
            worst = worst.max(v);
        }
        worst
    }
}

/// Smallest penalty at which every slope is zero: `max_j |x̃_j' w ỹ| / n`.
pub fn lambda_max<T: Real>(x: &Matrix<T>, y: &[T], weights: Option<&[T]>) -> Result<T> {
    let s = standardize(x, y, weights)?;
    Ok((0..x.ncols()).map(|j| s.gradient(j, &s.y).abs()).fold(T::zero(), T::max))
}

pub fn lasso<T: Real>(x: &Matrix<T>, y: &[T], lambda: T) -> Result<LassoFit<T>> {
    lasso_with(x, y, lambda, &LassoOptions::default())
}

pub fn lasso_with<T: Real>(x: &Matrix<T>, y: &[T], lambda: T, opts: &LassoOptions<T>) -> Result<LassoFit<T>> {
    if !(lambda >= T::zero()) {
        return Err(CoreError::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    let s = standardize(x, y, opts.weights.as_deref())?;
    let p = x.ncols();
    let mut b = vec![T::zero(); p];
    let mut r = s.y.clone();
    let step_tol = opts.tol * T::lit(0.1) / T::from_usize_lossy(p.max(1));
    let mut sweeps = 0;
    let mut violation = T::zero();
    let mut converged = p == 0;
    while !converged && sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_delta = T::zero();
        for j in 0..p {
            if s.scale[j] == T::zero() {
                continue;
            }
            let old = b[j];
            let new = soft_threshold(s.gradient(j, &r) + old, lambda);
            let delta = new - old;
            if delta != T::zero() {
                for (ri, &xij) in r.iter_mut().zip(&s.cols[j]) {
                    *ri -= xij * delta;
                }
                b[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta <= step_tol {
            violation = s.kkt_violation(&b, lambda);
            if violation <= opts.tol {
                converged = true;
            } else {
                // Refresh the running residual to shed accumulated rounding.
                r = s.residual(&b);
            }
        }
    }
    if !converged {
        return Err(CoreError::NonConvergence { solver: "lasso coordinate descent", iterations: sweeps });
    }
    let coef: Vec<T> =
        b.iter().zip(&s.scale).map(|(&bj, &sd)| if sd > T::zero() { bj / sd } else { T::zero() }).collect();
    let intercept = s.y_mean - coef.iter().zip(&s.center).map(|(&c, &m)| c * m).sum::<T>();
    Ok(LassoFit {
        lambda,
        intercept,
        coef,
        std_coef: b,
        center: s.center,
        scale: s.scale,
        sweeps,
        kkt_violation: violation,
    })
}

/// Penalty-rule constants.
#[derive(Debug, Clone, Copy)]
pub struct PluginRule<T> {
    pub c: T,
    pub gamma: T,
    /// Number of residual-based refinements of the noise scale.
    pub passes: usize,
}

impl<T: Real> Default for PluginRule<T> {
    fn default() -> Self {
        Self { c: T::lit(1.1), gamma: T::lit(0.05), passes: 2 }
    }
}

/// `λ = 2 c σ Φ^{-1}(1 - γ/(2p)) / √n`, the penalty level for the
/// `(1/n)‖y - Xβ‖² + λ‖β‖₁` normalisation. Use [`lasso_scale`] before
/// passing it to [`lasso`], which minimizes the `(1/2n)` form.
pub fn plugin_lambda_formula<T: Real>(n: usize, p: usize, sigma: T, c: T, gamma: T) -> T {
    let p = T::from_usize_lossy(p.max(1));
    let z = normal_quantile(T::one() - gamma / (T::lit(2.0) * p));
    T::lit(2.0) * c * sigma * z / T::from_usize_lossy(n).sqrt()
}

/// Converts a `(1/n)`-normalised penalty to the `(1/2n)` objective of [`lasso`].
pub fn lasso_scale<T: Real>(lambda: T) -> T {
    lambda / T::lit(2.0)
}

/// Plug-in penalty with the noise scale iterated from lasso residuals.
/// Returned on the `(1/n)` scale of [`plugin_lambda_formula`].
pub fn plugin_lambda<T: Real>(x: &Matrix<T>, y: &[T], gamma: T) -> Result<T> {
    plugin_lambda_with(x, y, &PluginRule { gamma, ..PluginRule::default() }, None)
}

pub fn plugin_lambda_with<T: Real>(x: &Matrix<T>, y: &[T], rule: &PluginRule<T>, weights: Option<&[T]>) -> Result<T> {
    let n = x.nrows();
    let w = normalized_weights(n, weights)?;
    let nf = T::from_usize_lossy(n);
    let wmean = y.iter().zip(&w).map(|(&a, &b)| a * b).sum::<T>() / nf;
    let mut sigma = (y.iter().zip(&w).map(|(&a, &b)| b * (a - wmean) * (a - wmean)).sum::<T>() / nf).sqrt();
    let mut lambda = plugin_lambda_formula(n, x.ncols(), sigma, rule.c, rule.gamma);
    let opts = LassoOptions { weights: weights.map(<[T]>::to_vec), ..LassoOptions::default() };
    for _ in 0..rule.passes {
        let fit = lasso_with(x, y, lasso_scale(lambda), &opts)?;
        let pred = fit.predict(x);
        sigma = (y.iter().zip(&pred).zip(&w).map(|((&a, &b), &wi)| wi * (a - b) * (a - b)).sum::<T>() / nf).sqrt();
        lambda = plugin_lambda_formula(n, x.ncols(), sigma, rule.c, rule.gamma);
    }
    Ok(lambda)
}

/// K-fold cross-validated penalty over a log-spaced grid from `lambda_max`
/// down to `1e-3 lambda_max`. Folds are contiguous blocks, which keeps the
/// choice deterministic and respects time ordering.
pub fn cv_lambda<T: Real>(x: &Matrix<T>, y: &[T], folds: usize, grid: usize) -> Result<T> {
    let n = x.nrows();
    if folds < 2 || folds > n || grid == 0 {
        return Err(CoreError::InvalidArgument(format!(
            "bad cross-validation setup: {folds} folds, {grid} grid points"
        )));
    }
    let top = lambda_max(x, y, None)?;
    if top == T::zero() {
        return Ok(T::zero());
    }
    let ratio = T::lit(1e-3).powf(T::one() / T::from_usize_lossy(grid.saturating_sub(1).max(1)));
    let lambdas: Vec<T> = (0..grid).map(|k| top * ratio.powi(k as i32)).collect();
    let mut loss = vec![T::zero(); grid];
    for f in 0..folds {
        let (lo, hi) = (f * n / folds, (f + 1) * n / folds);
        let train: Vec<usize> = (0..n).filter(|&i| i < lo || i >= hi).collect();
        let test: Vec<usize> = (lo..hi).collect();
        let (xt, xv) = (x.select_rows(&train), x.select_rows(&test));
        let yt: Vec<T> = train.iter().map(|&i| y[i]).collect();
        for (k, &l) in lambdas.iter().enumerate() {
            let pred = lasso(&xt, &yt, l)?.predict(&xv);
            loss[k] += test.iter().zip(&pred).map(|(&i, &p)| (y[i] - p) * (y[i] - p)).sum::<T>();
        }
    }
    let best = (0..grid).fold(0, |b, k| if loss[k] < loss[b] { k } else { b });
    Ok(lambdas[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::least_squares;

    fn standardized_column(n: usize) -> Vec<f64> {
        // Symmetric +-1 pattern: mean 0, population variance 1.
        (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
    }

    #[test]
    fn cross_validation_picks_interior_penalty() {
        let n = 80;
        let a: Vec<f64> = (0..n).map(|i| (i as f64 * 0.71).sin()).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 1.37).cos()).collect();
        let y: Vec<f64> = (0..n).map(|i| 2.0 * a[i] + 0.3 * ((i * 17 % 11) as f64 / 11.0 - 0.5)).collect();
        let x = Matrix::from_columns(n, &[a, b]);
        let top = lambda_max(&x, &y, None).unwrap();
        let l = cv_lambda(&x, &y, 5, 20).unwrap();
        assert!(l < 0.5 * top && l > 0.0);
        assert!(cv_lambda(&x, &y, 1, 20).is_err());
    }

    #[test]
    fn soft_threshold_closed_form() {
        let x = standardized_column(10);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = lasso(&Matrix::from_columns(10, &[x]), &y, 0.5).unwrap();
        assert!((fit.coef[0] - 1.5).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn zero_penalty_is_least_squares() {
        let n = 40;
        let a: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos() + 0.3 * a[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * a[i] - b[i] + 0.05 * ((i * 7 % 5) as f64)).collect();
        let x = Matrix::from_columns(n, &[a, b]);
        let fit = lasso(&x, &y, 0.0).unwrap();
        let ols = least_squares(&x.with_intercept(), &y, None).unwrap();
        assert!((fit.intercept - ols[0]).abs() < 1e-6);
        assert!((fit.coef[0] - ols[1]).abs() < 1e-6);
        assert!((fit.coef[1] - ols[2]).abs() < 1e-6);
    }

    #[test]
    fn lambda_max_zeroes_all_slopes() {
        let n = 30;
        let a: Vec<f64> = (0..n).map(|i| (i as f64).sqrt()).collect();
        let b: Vec<f64> = (0..n).map(|i| ((i * i) % 7) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| a[i] - 0.5 * b[i]).collect();
        let x = Matrix::from_columns(n, &[a, b]);
        let lmax = lambda_max(&x, &y, None).unwrap();
        let fit = lasso(&x, &y, lmax).unwrap();
        assert!(fit.coef.iter().all(|&c| c == 0.0));
        let fit = lasso(&x, &y, lmax * 0.9).unwrap();
        assert!(fit.coef.iter().any(|&c| c != 0.0));
    }

    #[test]
    fn constant_column_never_selected() {
        let n = 20;
        let a: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let x = Matrix::from_columns(n, &[vec![3.0; n], a.clone()]);
        let fit = lasso(&x, &a, 0.01).unwrap();
        assert_eq!(fit.coef[0], 0.0);
        assert_eq!(fit.selected(), vec![1]);
    }

    #[test]
    fn plugin_formula_example() {
        let lam: f64 = plugin_lambda_formula(100, 1, 1.0, 1.1, 0.05);
        assert!((lam - 2.0 * 1.1 * 1.959_963_984_540_054 / 10.0).abs() < 1e-9);
        assert!((lam - 0.4312).abs() < 1e-4);
        let doubled: f64 = plugin_lambda_formula(100, 1, 2.0, 1.1, 0.05);
        assert!((doubled - 2.0 * lam).abs() < 1e-12);
        let wider: f64 = plugin_lambda_formula(100, 5, 1.0, 1.1, 0.05);
        assert!(wider > lam);
    }

    #[test]
    fn negative_lambda_rejected() {
        let x = Matrix::from_columns(3, &[vec![1.0, 2.0, 3.0]]);
        assert!(lasso(&x, &[1.0, 2.0, 3.0], -1.0).is_err());
    }
}
