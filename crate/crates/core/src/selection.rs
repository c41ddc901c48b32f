//! Post-double-selection inference on a single target regressor.
//!
//! Mean case: a lasso of the outcome on the controls and a lasso of the
//! target regressor on the controls each pick a set; the outcome is then
//! regressed by OLS on the target regressor plus the union, with HAC
//! standard errors.
//!
//! Quantile case (weighted double selection):
//! 1. penalized quantile regression of the outcome on the target and the
//!    controls (target unpenalized);
//! 2. conditional densities at the quantile from post-selection fits at
//!    `τ ± h`, `f_i = 2h / (Q_{τ+h}(x_i) - Q_{τ-h}(x_i))`, clipped;
//! 3. density-weighted lasso of the target on the controls;
//! 4. density-weighted quantile regression on the target plus the union,
//!    with the weighted sandwich variance.

use serde::{Deserialize, Serialize};

use crate::dist::normal_quantile;
use crate::error::{CoreError, Result};
use crate::lasso::{lasso_scale, lasso_with, plugin_lambda_with, LassoOptions, PluginRule};
use crate::linalg::{default_pivot_tol, Cholesky, Matrix};
use crate::ols::{ols_hac, CoefficientEstimate};
use crate::quantile::{penalized_qr_loadings, quantile_regression, weighted_quantile_regression};
use crate::scalar::{iqr, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult<T> {
    pub stage1_selected: Vec<String>,
    pub stage2_selected: Vec<String>,
    pub union: Vec<String>,
    pub estimate: CoefficientEstimate<T>,
    /// Penalties used in the two selection stages.
    pub lambdas: (T, T),
    /// Observations whose density weight hit a clipping bound (quantile case).
    pub clipped_weights: usize,
}

#[derive(Debug, Clone)]
pub struct DoubleSelectionOptions<T> {
    pub rule: PluginRule<T>,
    pub hac_lags: Option<usize>,
    /// Overrides the plug-in penalties for the (outcome, target) stages.
    pub lambdas: Option<(T, T)>,
}

impl<T: Real> Default for DoubleSelectionOptions<T> {
    fn default() -> Self {
        Self { rule: PluginRule::default(), hac_lags: None, lambdas: None }
    }
}

fn check_dims<T: Real>(controls: &Matrix<T>, names: &[String], y: &[T], s: &[T]) -> Result<()> {
    let n = controls.nrows();
    if names.len() != controls.ncols() {
        return Err(CoreError::Dimension(format!("{} names for {} controls", names.len(), controls.ncols())));
    }
    if y.len() != n || s.len() != n {
        return Err(CoreError::Dimension(format!("y={}, s={}, X={} rows", y.len(), s.len(), n)));
    }
    Ok(())
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn names_of(idx: &[usize], names: &[String]) -> Vec<String> {
    idx.iter().map(|&j| names[j].clone()).collect()
}

/// `[1 | s | X_keep]`.
fn target_design<T: Real>(s: &[T], controls: &Matrix<T>, keep: &[usize]) -> Matrix<T> {
    let n = s.len();
    Matrix::from_columns(n, &[s.to_vec()]).hstack(&controls.select_columns(keep)).with_intercept()
}

/// Post-double-lasso estimate of the coefficient on `s`.
pub fn double_lasso<T: Real>(
    controls: &Matrix<T>,
    names: &[String],
    y: &[T],
    s: &[T],
    s_name: &str,
    opts: &DoubleSelectionOptions<T>,
) -> Result<SelectionResult<T>> {
    check_dims(controls, names, y, s)?;
    let (mut stage1, mut stage2) = (Vec::new(), Vec::new());
    let mut lambdas = (T::zero(), T::zero());
    if controls.ncols() > 0 {
        let lasso_opts = LassoOptions::default();
        let (l1, l2) = match opts.lambdas {
            Some(l) => l,
            None => (
                lasso_scale(plugin_lambda_with(controls, y, &opts.rule, None)?),
                lasso_scale(plugin_lambda_with(controls, s, &opts.rule, None)?),
            ),
        };
        lambdas = (l1, l2);
        stage1 = lasso_with(controls, y, l1, &lasso_opts)?.selected();
        stage2 = lasso_with(controls, s, l2, &lasso_opts)?.selected();
    }
    let union = union_sorted(&stage1, &stage2);
    let z = target_design(s, controls, &union);
    let mut col_names = vec!["intercept".to_string(), s_name.to_string()];
    col_names.extend(names_of(&union, names));
    let fit = ols_hac(&z, &col_names, y, opts.hac_lags)?;
    Ok(SelectionResult {
        stage1_selected: names_of(&stage1, names),
        stage2_selected: names_of(&stage2, names),
        union: names_of(&union, names),
        estimate: fit.estimates[1].clone(),
        lambdas,
        clipped_weights: 0,
    })
}

/// Penalty for `Σ ρ_τ + λ Σ |b_j|` over unit-variance columns:
/// `c √(n τ(1-τ)) Φ^{-1}(1 - γ/(2p))`.
pub fn quantile_plugin_lambda<T: Real>(n: usize, p: usize, tau: T, rule: &PluginRule<T>) -> T {
    let p = T::from_usize_lossy(p.max(1));
    let z = normal_quantile(T::one() - rule.gamma / (T::lit(2.0) * p));
    rule.c * (T::from_usize_lossy(n) * tau * (T::one() - tau)).sqrt() * z
}

/// Density bandwidth `n^{-1/5} min(1, IQR(y)/1.349)`, kept inside `(0, min(τ, 1-τ))`.
pub fn density_bandwidth<T: Real>(y: &[T], tau: T) -> T {
    let n = T::from_usize_lossy(y.len());
    let spread = iqr(y) / T::lit(1.349);
    let mut h = n.powf(T::lit(-0.2)) * T::one().min(spread);
    if !(h > T::zero()) {
        h = n.powf(T::lit(-0.2));
    }
    h.min(T::lit(0.9) * tau.min(T::one() - tau))
}

#[derive(Debug, Clone)]
pub struct WeightedSelectionOptions<T> {
    pub rule: PluginRule<T>,
    /// Density bandwidth; `None` uses [`density_bandwidth`].
    pub bandwidth: Option<T>,
    pub weight_bounds: (T, T),
}

impl<T: Real> Default for WeightedSelectionOptions<T> {
    fn default() -> Self {
        Self { rule: PluginRule::default(), bandwidth: None, weight_bounds: (T::lit(0.01), T::lit(100.0)) }
    }
}

fn column_sd<T: Real>(c: &[T]) -> T {
    crate::scalar::variance(c).sqrt()
}

pub fn weighted_double_selection<T: Real>(
    controls: &Matrix<T>,
    names: &[String],
    y: &[T],
    s: &[T],
    s_name: &str,
    tau: T,
    opts: &WeightedSelectionOptions<T>,
) -> Result<SelectionResult<T>> {
    check_dims(controls, names, y, s)?;
    if !(tau > T::zero() && tau < T::one()) {
        return Err(CoreError::InvalidArgument(format!("quantile level must lie in (0,1), got {tau}")));
    }
    let n = y.len();
    let p = controls.ncols();
    let zero_tol = T::tol(1e-7);

    // (1) penalized QR of y on (s, X); s is unpenalized.
    let sd: Vec<T> = (0..p).map(|j| column_sd(&controls.column(j))).collect();
    let lambda1 = quantile_plugin_lambda(n, p, tau, &opts.rule);
    let stage1: Vec<usize> = if p > 0 {
        let x1 = Matrix::from_columns(n, &[s.to_vec()]).hstack(controls);
        let mut pen = vec![T::zero()];
        pen.extend(sd.iter().map(|&v| lambda1 * v));
        let fit = penalized_qr_loadings(&x1, y, tau, &pen, None)?;
        (0..p).filter(|&j| sd[j] > T::zero() && (fit.coef[j + 1] * sd[j]).abs() > zero_tol).collect()
    } else {
        Vec::new()
    };

    // (2) density weights from post-selection fits at tau +- h.
    let h = opts.bandwidth.unwrap_or_else(|| density_bandwidth(y, tau));
    if !(h > T::zero()) || tau - h <= T::zero() || tau + h >= T::one() {
        return Err(CoreError::InvalidArgument(format!("bandwidth {h} incompatible with tau {tau}")));
    }
    let z1 = target_design(s, controls, &stage1);
    let hi = quantile_regression(&z1, y, tau + h)?.predict(&z1);
    let lo = quantile_regression(&z1, y, tau - h)?.predict(&z1);
    let (wmin, wmax) = opts.weight_bounds;
    let mut clipped = 0;
    let f: Vec<T> = hi
        .iter()
        .zip(&lo)
        .map(|(&a, &b)| {
            let spread = a - b;
            let raw = if spread > T::zero() { T::lit(2.0) * h / spread } else { T::infinity() };
            if raw < wmin || raw > wmax {
                clipped += 1;
            }
            raw.max(wmin).min(wmax)
        })
        .collect();

    // (3) f-weighted lasso of s on X (squared loss weights f^2).
    let f2: Vec<T> = f.iter().map(|&v| v * v).collect();
    let mut lambda2 = T::zero();
    let stage2: Vec<usize> = if p > 0 {
        lambda2 = lasso_scale(plugin_lambda_with(controls, s, &opts.rule, Some(&f2))?);
        lasso_with(controls, s, lambda2, &LassoOptions::weighted(f2.clone()))?.selected()
    } else {
        Vec::new()
    };

    // (4) weighted QR on s plus the union; unweighted when there are no controls.
    let union = union_sorted(&stage1, &stage2);
    let z = target_design(s, controls, &union);
    let final_weights: Vec<T> = if p > 0 { f.clone() } else { vec![T::one(); n] };
    let fit = weighted_quantile_regression(&z, y, tau, &final_weights)?;

    // Sandwich: J = Σ v_i f_i z z', M = τ(1-τ) Σ v_i^2 z z'.
    let jw: Vec<T> = final_weights.iter().zip(&f).map(|(&v, &fi)| v * fi).collect();
    let mw: Vec<T> = final_weights.iter().map(|&v| v * v).collect();
    let j_inv = Cholesky::new(&z.gram(Some(&jw)), default_pivot_tol())?.inverse();
    let meat = z.gram(Some(&mw));
    let cov = j_inv.matmul(&meat).matmul(&j_inv);
    let se = (tau * (T::one() - tau) * cov[(1, 1)]).max(T::zero()).sqrt();

    Ok(SelectionResult {
        stage1_selected: names_of(&stage1, names),
        stage2_selected: names_of(&stage2, names),
        union: names_of(&union, names),
        estimate: CoefficientEstimate::from_beta_se(s_name, fit.coef[1], se),
        lambdas: (lambda1, lambda2),
        clipped_weights: clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ols::ols_hac;

    fn toy(n: usize) -> (Vec<f64>, Vec<f64>) {
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let y: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * s[i] + 0.3 * ((i * 13 % 7) as f64 - 3.0)).collect();
        (s, y)
    }

    #[test]
    fn no_controls_reduces_to_ols_on_target() {
        let (s, y) = toy(60);
        let x = Matrix::<f64>::zeros(60, 0);
        let res = double_lasso(&x, &[], &y, &s, "S", &DoubleSelectionOptions::default()).unwrap();
        let z = Matrix::from_columns(60, &[vec![1.0; 60], s.clone()]);
        let direct = ols_hac(&z, &["c".into(), "S".into()], &y, None).unwrap();
        assert!((res.estimate.beta - direct.estimates[1].beta).abs() < 1e-12);
        assert!((res.estimate.std_error - direct.estimates[1].std_error).abs() < 1e-12);
        assert!(res.union.is_empty());
    }

    #[test]
    fn no_controls_reduces_to_qr_on_target() {
        let (s, y) = toy(61);
        let x = Matrix::<f64>::zeros(61, 0);
        let res = weighted_double_selection(&x, &[], &y, &s, "S", 0.5, &WeightedSelectionOptions::default()).unwrap();
        let z = Matrix::from_columns(61, &[vec![1.0; 61], s.clone()]);
        let direct = quantile_regression(&z, &y, 0.5).unwrap();
        assert!((res.estimate.beta - direct.coef[1]).abs() < 1e-8);
        assert!(res.estimate.std_error > 0.0);
    }

    #[test]
    fn union_contains_both_stages() {
        let n = 120;
        let a: Vec<f64> = (0..n).map(|i| (i as f64 * 0.71).sin()).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.23).cos()).collect();
        let c: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let s: Vec<f64> = (0..n).map(|i| 2.0 * b[i] + 0.3 * c[i] + 0.5 * (i as f64 * 2.9).sin()).collect();
        let y: Vec<f64> = (0..n).map(|i| 3.0 * a[i] + 0.2 * s[i] + 0.1 * c[i]).collect();
        let x = Matrix::from_columns(n, &[a, b.clone(), c.clone()]);
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let res = double_lasso(&x, &names, &y, &s, "S", &DoubleSelectionOptions::default()).unwrap();
        for name in res.stage1_selected.iter().chain(&res.stage2_selected) {
            assert!(res.union.contains(name));
        }
        assert!(res.union.contains(&"a".to_string()) && res.union.contains(&"b".to_string()));

        // A target that the selected controls reproduce exactly is an error.
        let exact: Vec<f64> = (0..n).map(|i| 2.0 * b[i] + 0.3 * c[i]).collect();
        let err = double_lasso(&x, &names, &y, &exact, "S", &DoubleSelectionOptions::default());
        assert!(matches!(err, Err(CoreError::RankDeficient { .. })));
    }

    #[test]
    fn bandwidth_stays_inside_unit_interval() {
        let y: Vec<f64> = (0..50).map(f64::from).collect();
        let h = density_bandwidth(&y, 0.05);
        assert!(h > 0.0 && h < 0.05);
    }
}
