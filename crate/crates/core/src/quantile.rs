//! Quantile regression by a primal-dual (Frisch–Newton) interior point
//! method with Mehrotra predictor-corrector steps.
//!
//! The solver works on the bounded dual
//!
//! ```text
//! min  -y'a   s.t.  X'a = (1 - τ) X'1,   0 <= a <= 1
//! ```
//!
//! whose equality multipliers are `-β`. Once the duality gap is closed the
//! interior solution is polished onto a vertex: the `p` observations with
//! the smallest absolute residuals are interpolated exactly, and the vertex
//! is kept when its check loss is no worse.
//!
//! Lasso-penalized fits reuse the same solver through pseudo-observations:
//! for every penalized coefficient the rows `(±λ_j e_j, 0)` add
//! `ρ_τ(λ_j β_j) + ρ_τ(-λ_j β_j) = λ_j |β_j|` to the objective.

use crate::error::{CoreError, Result};
use crate::linalg::{default_pivot_tol, solve_square, Cholesky, Matrix};
use crate::scalar::{empirical_quantile, Real};

/// Check (pinball) loss `u (τ - 1{u < 0})`.
#[inline]
pub fn check_loss<T: Real>(u: T, tau: T) -> T {
    if u < T::zero() {
        u * (tau - T::one())
    } else {
        u * tau
    }
}

pub fn check_objective<T: Real>(x: &Matrix<T>, y: &[T], beta: &[T], tau: T) -> T {
    x.mul_vec(beta).iter().zip(y).map(|(&f, &yi)| check_loss(yi - f, tau)).sum()
}

#[derive(Debug, Clone)]
pub struct InteriorPointOptions<T> {
    pub max_iter: usize,
    /// Relative duality-gap tolerance.
    pub gap_tol: T,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: T,
    pub polish: bool,
}

impl<T: Real> Default for InteriorPointOptions<T> {
    fn default() -> Self {
        Self { max_iter: 500, gap_tol: T::tol(1e-12), step_fraction: T::lit(0.99995), polish: true }
    }
}

#[derive(Debug, Clone)]
pub struct QuantileFit<T> {
    pub coef: Vec<T>,
    /// Check loss at `coef`.
    pub objective: T,
    pub iterations: usize,
    /// Dual solution `a` in `[0, 1]^n` (before polishing).
    pub dual: Vec<T>,
}

impl<T: Real> QuantileFit<T> {
    pub fn predict(&self, x: &Matrix<T>) -> Vec<T> {
        x.mul_vec(&self.coef)
    }
}

fn validate_tau<T: Real>(tau: T) -> Result<()> {
    if tau > T::zero() && tau < T::one() {
        Ok(())
    } else {
        Err(CoreError::InvalidArgument(format!("quantile level must lie in (0,1), got {tau}")))
    }
}

fn max_step<T: Real>(v: &[T], dv: &[T]) -> T {
    let mut a = T::infinity();
    for (&vi, &di) in v.iter().zip(dv) {
        if di < T::zero() {
            a = a.min(-vi / di);
        }
    }
    a
}

/// Unweighted quantile regression of `y` on the columns of `x` as given
/// (include a column of ones for an intercept).
pub fn quantile_regression<T: Real>(x: &Matrix<T>, y: &[T], tau: T) -> Result<QuantileFit<T>> {
    quantile_regression_with(x, y, tau, &InteriorPointOptions::default())
}

/// Minimizes `Σ w_i ρ_τ(y_i - x_i'β)` for nonnegative weights.
pub fn weighted_quantile_regression<T: Real>(x: &Matrix<T>, y: &[T], tau: T, weights: &[T]) -> Result<QuantileFit<T>> {
    if weights.len() != y.len() {
        return Err(CoreError::Dimension(format!("{} weights for {} rows", weights.len(), y.len())));
    }
    if weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
        return Err(CoreError::InvalidArgument("weights must be finite and >= 0".into()));
    }
    let xw = x.scale_rows(weights);
    let yw: Vec<T> = y.iter().zip(weights).map(|(&a, &b)| a * b).collect();
    let mut fit = quantile_regression(&xw, &yw, tau)?;
    fit.objective =
        x.mul_vec(&fit.coef).iter().zip(y).zip(weights).map(|((&f, &yi), &w)| w * check_loss(yi - f, tau)).sum();
    Ok(fit)
}

pub fn quantile_regression_with<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    tau: T,
    opts: &InteriorPointOptions<T>,
) -> Result<QuantileFit<T>> {
    validate_tau(tau)?;
    let (n, p) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(CoreError::Dimension(format!("y has {} rows, X has {}", y.len(), n)));
    }
    if n < p || n == 0 {
        return Err(CoreError::TooFewObservations { needed: p.max(1), have: n });
    }
    if p == 0 {
        return Ok(QuantileFit {
            coef: vec![],
            objective: y.iter().map(|&v| check_loss(v, tau)).sum(),
            iterations: 0,
            dual: vec![T::one() - tau; n],
        });
    }

    let one = T::one();
    let two_n = T::from_usize_lossy(2 * n);
    let c: Vec<T> = y.iter().map(|&v| -v).collect();
    let mut xa: Vec<T> = vec![one - tau; n];
    let b = x.tr_mul_vec(&xa);
    let mut s: Vec<T> = vec![tau; n];

    // Dual start from least squares so that A'y + z - w = c holds exactly.
    let chol = Cholesky::new(&x.gram(None), default_pivot_tol())?;
    let mut dual_y = chol.solve(&x.tr_mul_vec(&c));
    let r = {
        let fitted = x.mul_vec(&dual_y);
        c.iter().zip(&fitted).map(|(&ci, &fi)| ci - fi).collect::<Vec<T>>()
    };
    let mean_abs = r.iter().map(|v| v.abs()).sum::<T>() / T::from_usize_lossy(n);
    let bump = (mean_abs * T::lit(1e-2)).max(T::lit(1e-6));
    let mut z: Vec<T> = r.iter().map(|&v| v.max(T::zero()) + bump).collect();
    let mut w: Vec<T> = r.iter().map(|&v| (-v).max(T::zero()) + bump).collect();

    let mut iterations = 0;
    loop {
        let gap: T =
            xa.iter().zip(&z).map(|(&a, &b)| a * b).sum::<T>() + s.iter().zip(&w).map(|(&a, &b)| a * b).sum::<T>();
        let primal_obj: T = c.iter().zip(&xa).map(|(&a, &b)| a * b).sum();
        if gap <= opts.gap_tol * (one + primal_obj.abs()) {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(CoreError::NonConvergence { solver: "interior point quantile regression", iterations });
        }
        iterations += 1;
        let mu = gap / two_n;

        let ax = x.tr_mul_vec(&xa);
        let r_b: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let aty = x.mul_vec(&dual_y);
        let r_c: Vec<T> = (0..n).map(|i| c[i] - aty[i] - z[i] + w[i]).collect();
        let d: Vec<T> = (0..n).map(|i| one / (z[i] / xa[i] + w[i] / s[i])).collect();
        let chol_m = Cholesky::new(&x.gram(Some(&d)), T::epsilon() * T::lit(10.0))
            .map_err(|_| CoreError::NonConvergence { solver: "interior point quantile regression", iterations })?;

        let direction = |r_xz: &[T], r_sw: &[T]| {
            let rho: Vec<T> = (0..n).map(|i| r_xz[i] / xa[i] - r_sw[i] / s[i] - r_c[i]).collect();
            let d_rho: Vec<T> = (0..n).map(|i| d[i] * rho[i]).collect();
            let ad_rho = x.tr_mul_vec(&d_rho);
            let rhs: Vec<T> = r_b.iter().zip(&ad_rho).map(|(&a, &b)| a - b).collect();
            let dy = chol_m.solve(&rhs);
            let atdy = x.mul_vec(&dy);
            let dx: Vec<T> = (0..n).map(|i| d[i] * (atdy[i] + rho[i])).collect();
            let ds: Vec<T> = dx.iter().map(|&v| -v).collect();
            let dz: Vec<T> = (0..n).map(|i| (r_xz[i] - z[i] * dx[i]) / xa[i]).collect();
            let dw: Vec<T> = (0..n).map(|i| (r_sw[i] + w[i] * dx[i]) / s[i]).collect();
            (dx, ds, dy, dz, dw)
        };

        // Predictor.
        let r_xz: Vec<T> = (0..n).map(|i| -xa[i] * z[i]).collect();
        let r_sw: Vec<T> = (0..n).map(|i| -s[i] * w[i]).collect();
        let (dx, ds, _, dz, dw) = direction(&r_xz, &r_sw);
        let ap = max_step(&xa, &dx).min(max_step(&s, &ds)).min(one);
        let ad = max_step(&z, &dz).min(max_step(&w, &dw)).min(one);
        let mu_aff = ((0..n)
            .map(|i| (xa[i] + ap * dx[i]) * (z[i] + ad * dz[i]) + (s[i] + ap * ds[i]) * (w[i] + ad * dw[i]))
            .sum::<T>())
            / two_n;
        let sigma = (mu_aff / mu).powi(3).min(one);

        // Corrector.
        let target = sigma * mu;
        let r_xz: Vec<T> = (0..n).map(|i| target - xa[i] * z[i] - dx[i] * dz[i]).collect();
        let r_sw: Vec<T> = (0..n).map(|i| target - s[i] * w[i] - ds[i] * dw[i]).collect();
        let (dx, ds, dy, dz, dw) = direction(&r_xz, &r_sw);
        let ap = (opts.step_fraction * max_step(&xa, &dx).min(max_step(&s, &ds))).min(one);
        let ad = (opts.step_fraction * max_step(&z, &dz).min(max_step(&w, &dw))).min(one);
        for i in 0..n {
            xa[i] += ap * dx[i];
            s[i] += ap * ds[i];
            z[i] += ad * dz[i];
            w[i] += ad * dw[i];
        }
        for (yj, dyj) in dual_y.iter_mut().zip(&dy) {
            *yj += ad * *dyj;
        }
    }

    let coef: Vec<T> = dual_y.iter().map(|&v| -v).collect();
    let objective = check_objective(x, y, &coef, tau);
    let mut fit = QuantileFit { coef, objective, iterations, dual: xa };
    if opts.polish {
        polish_to_vertex(x, y, tau, &mut fit);
    }
    Ok(fit)
}

fn polish_to_vertex<T: Real>(x: &Matrix<T>, y: &[T], tau: T, fit: &mut QuantileFit<T>) {
    let p = x.ncols();
    let fitted = x.mul_vec(&fit.coef);
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = (y[i] - fitted[i]).abs();
        let rj = (y[j] - fitted[j]).abs();
        ri.partial_cmp(&rj).unwrap().then(i.cmp(&j))
    });
    // Greedily assemble p linearly independent rows among the smallest residuals.
    let mut basis: Vec<usize> = Vec::with_capacity(p);
    for &i in &order {
        if basis.len() == p {
            break;
        }
        let mut trial = basis.clone();
        trial.push(i);
        let sub = x.select_rows(&trial);
        if Cholesky::new(&sub.matmul(&sub.transpose()), T::epsilon().sqrt()).is_ok() {
            basis = trial;
        }
    }
    if basis.len() < p {
        return;
    }
    let xb = x.select_rows(&basis);
    let yb: Vec<T> = basis.iter().map(|&i| y[i]).collect();
    let Some(candidate) = solve_square(&xb, &yb) else { return };
    let obj = check_objective(x, y, &candidate, tau);
    let slack = T::tol(1e-10) * (T::one() + fit.objective.abs());
    if obj <= fit.objective + slack {
        fit.coef = candidate;
        fit.objective = obj;
    }
}

#[derive(Debug, Clone)]
pub struct PenalizedQuantileFit<T> {
    pub intercept: T,
    pub coef: Vec<T>,
    /// Check loss of the fit (without the penalty).
    pub check_loss: T,
    /// Check loss plus `Σ λ_j |β_j|`.
    pub objective: T,
}

impl<T: Real> PenalizedQuantileFit<T> {
    pub fn selected(&self, zero_tol: T) -> Vec<usize> {
        self.coef.iter().enumerate().filter(|(_, b)| b.abs() > zero_tol).map(|(j, _)| j).collect()
    }

    pub fn predict(&self, x: &Matrix<T>) -> Vec<T> {
        x.mul_vec(&self.coef).into_iter().map(|v| v + self.intercept).collect()
    }
}

/// `Σ ρ_τ(y_i - a - x_i'β) + λ Σ |β_j|` with an unpenalized intercept;
/// `x` excludes the intercept.
pub fn penalized_qr<T: Real>(x: &Matrix<T>, y: &[T], tau: T, lambda: T) -> Result<PenalizedQuantileFit<T>> {
    let loadings = vec![lambda; x.ncols()];
    penalized_qr_loadings(x, y, tau, &loadings, None)
}

/// Per-coefficient penalties `λ_j` (zero leaves a slope unpenalized) and
/// optional observation weights.
pub fn penalized_qr_loadings<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    tau: T,
    penalties: &[T],
    weights: Option<&[T]>,
) -> Result<PenalizedQuantileFit<T>> {
    validate_tau(tau)?;
    let (n, p) = (x.nrows(), x.ncols());
    if penalties.len() != p {
        return Err(CoreError::Dimension(format!("{} penalties for {} columns", penalties.len(), p)));
    }
    if penalties.iter().any(|&l| !(l >= T::zero())) {
        return Err(CoreError::InvalidArgument("penalties must be >= 0".into()));
    }
    let design = x.with_intercept();
    let (mut xs, mut ys) = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(CoreError::Dimension(format!("{} weights for {} rows", w.len(), n)));
            }
            (design.scale_rows(w), y.iter().zip(w).map(|(&a, &b)| a * b).collect::<Vec<T>>())
        }
        None => (design.clone(), y.to_vec()),
    };
    let penalized: Vec<usize> = (0..p).filter(|&j| penalties[j] > T::zero()).collect();
    if !penalized.is_empty() {
        let mut pseudo = Matrix::zeros(2 * penalized.len(), p + 1);
        for (k, &j) in penalized.iter().enumerate() {
            pseudo[(2 * k, j + 1)] = penalties[j];
            pseudo[(2 * k + 1, j + 1)] = -penalties[j];
        }
        xs = xs.vstack(&pseudo);
        ys.extend(std::iter::repeat_n(T::zero(), 2 * penalized.len()));
    }
    let fit = quantile_regression(&xs, &ys, tau)?;
    let intercept = fit.coef[0];
    let coef = fit.coef[1..].to_vec();
    let fitted = design.mul_vec(&fit.coef);
    let check: T = match weights {
        Some(w) => fitted.iter().zip(y).zip(w).map(|((&f, &yi), &wi)| wi * check_loss(yi - f, tau)).sum(),
        None => fitted.iter().zip(y).map(|(&f, &yi)| check_loss(yi - f, tau)).sum(),
    };
    let penalty: T = coef.iter().zip(penalties).map(|(&b, &l)| l * b.abs()).sum();
    Ok(PenalizedQuantileFit { intercept, coef, check_loss: check, objective: check + penalty })
}

/// Intercept-only fit; returns the empirical `τ`-quantile directly.
pub fn intercept_only_quantile<T: Real>(y: &[T], tau: T) -> T {
    empirical_quantile(y, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_sample() {
        let y = [3.0_f64, -1.0, 7.0, 2.0, 10.0];
        let x = Matrix::from_columns(5, &[vec![1.0; 5]]);
        let fit = quantile_regression(&x, &y, 0.5).unwrap();
        assert!((fit.coef[0] - 3.0).abs() < 1e-9, "{:?}", fit.coef);
    }

    #[test]
    fn upper_quantile_in_solution_set() {
        let y: Vec<f64> = (1..=10).map(f64::from).collect();
        let x = Matrix::from_columns(10, &[vec![1.0; 10]]);
        let fit = quantile_regression(&x, &y, 0.9).unwrap();
        assert!(fit.coef[0] >= 9.0 - 1e-9 && fit.coef[0] <= 10.0 + 1e-9);
    }

    #[test]
    fn exact_linear_data_same_for_every_tau() {
        let x1: Vec<f64> = (0..25).map(|i| (i as f64 * 0.3).sin()).collect();
        let y: Vec<f64> = x1.iter().map(|v| 2.0 - 3.0 * v).collect();
        let x = Matrix::from_columns(25, &[vec![1.0; 25], x1]);
        for tau in [0.1, 0.5, 0.9] {
            let fit = quantile_regression(&x, &y, tau).unwrap();
            assert!((fit.coef[0] - 2.0).abs() < 1e-8 && (fit.coef[1] + 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn huge_penalty_leaves_intercept_quantile() {
        let n = 21;
        let x1: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let y: Vec<f64> = (0..n).map(|i| i as f64 + x1[i]).collect();
        let x = Matrix::from_columns(n, &[x1]);
        let fit = penalized_qr(&x, &y, 0.25, 1e6).unwrap();
        assert!(fit.coef[0].abs() < 1e-8);
        assert!((fit.intercept - empirical_quantile(&y, 0.25)).abs() < 1e-8);
    }

    #[test]
    fn invalid_tau() {
        let x = Matrix::from_columns(2, &[vec![1.0; 2]]);
        assert!(quantile_regression(&x, &[1.0, 2.0], 1.0).is_err());
        assert!(quantile_regression(&x, &[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn check_loss_values() {
        assert_eq!(check_loss(1.0, 0.9), 0.9);
        assert!((check_loss(-1.0_f64, 0.9) - 0.1).abs() < 1e-15);
    }
}
