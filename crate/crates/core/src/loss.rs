//! Forecast loss functions.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::quantile::check_loss;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Squared,
    Check,
    /// Conditional coverage of the one-sided interval: `(τ - 1{e < 0})^2`.
    Interval,
}

impl LossKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LossKind::Squared => "squared",
            LossKind::Check => "check",
            LossKind::Interval => "interval",
        }
    }
}

/// Loss of forecast error `e = actual - forecast`.
pub fn loss<T: Real>(kind: LossKind, e: T, tau: Option<T>) -> Result<T> {
    let need_tau = || {
        tau.filter(|t| *t > T::zero() && *t < T::one())
            .ok_or_else(|| CoreError::InvalidArgument(format!("{} loss needs tau in (0,1)", kind.as_str())))
    };
    Ok(match kind {
        LossKind::Squared => e * e,
        LossKind::Check => check_loss(e, need_tau()?),
        LossKind::Interval => {
            let t = need_tau()?;
            let hit = if e < T::zero() { T::one() } else { T::zero() };
            (t - hit) * (t - hit)
        }
    })
}
