//! Ordinary least squares with Newey–West standard errors.

use serde::{Deserialize, Serialize};

use crate::dist::two_sided_p;
use crate::error::{CoreError, Result};
use crate::hac::{bartlett_lag_rule, score_covariance};
use crate::linalg::{default_pivot_tol, Cholesky, Matrix};
use crate::scalar::Real;

/// One coefficient with its asymptotic-normal inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate<T> {
    pub name: String,
    pub beta: T,
    pub std_error: T,
    pub t_stat: T,
    pub p_value: T,
}

impl<T: Real> CoefficientEstimate<T> {
    pub fn from_beta_se(name: impl Into<String>, beta: T, std_error: T) -> Self {
        let t_stat = if std_error > T::zero() {
            beta / std_error
        } else if beta == T::zero() {
            T::zero()
        } else {
            T::infinity() * beta.signum()
        };
        Self { name: name.into(), beta, std_error, t_stat, p_value: two_sided_p(t_stat) }
    }
}

#[derive(Debug, Clone)]
pub struct OlsFit<T> {
    pub estimates: Vec<CoefficientEstimate<T>>,
    pub covariance: Matrix<T>,
    pub fitted: Vec<T>,
    pub residuals: Vec<T>,
    pub hac_lags: usize,
}

impl<T: Real> OlsFit<T> {
    pub fn coefficients(&self) -> Vec<T> {
        self.estimates.iter().map(|e| e.beta).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CoefficientEstimate<T>> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

/// `beta = (X'X)^{-1} X'y` with Bartlett HAC covariance
/// `(X'X)^{-1} S (X'X)^{-1}`. `X` must carry its own intercept column if one
/// is wanted. `hac_lags = None` applies [`bartlett_lag_rule`].
pub fn ols_hac<T: Real>(x: &Matrix<T>, names: &[String], y: &[T], hac_lags: Option<usize>) -> Result<OlsFit<T>> {
    let (n, p) = (x.nrows(), x.ncols());
    if names.len() != p {
        return Err(CoreError::Dimension(format!("{} names for {} columns", names.len(), p)));
    }
    if y.len() != n {
        return Err(CoreError::Dimension(format!("y has {} rows, X has {}", y.len(), n)));
    }
    if n <= p {
        return Err(CoreError::TooFewObservations { needed: p + 1, have: n });
    }
    let chol = Cholesky::new(&x.gram(None), default_pivot_tol())?;
    let beta = chol.solve(&x.tr_mul_vec(y));
    let fitted = x.mul_vec(&beta);
    let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let lags = hac_lags.unwrap_or_else(|| bartlett_lag_rule(n));
    let meat = score_covariance(x, &residuals, lags);
    let bread = chol.inverse();
    let covariance = bread.matmul(&meat).matmul(&bread);
    let estimates = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = covariance[(j, j)].max(T::zero()).sqrt();
            CoefficientEstimate::from_beta_se(name.clone(), beta[j], se)
        })
        .collect();
    Ok(OlsFit { estimates, covariance, fitted, residuals, hac_lags: lags })
}
