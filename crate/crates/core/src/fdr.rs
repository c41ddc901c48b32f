//! Benjamini–Hochberg step-up adjusted p-values and the adaptive two-step
//! variant that plugs in an estimate of the number of true nulls.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdrMethod {
    Bh,
    AdaptiveBh,
}

impl FdrMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FdrMethod::Bh => "bh",
            FdrMethod::AdaptiveBh => "adaptive_bh",
        }
    }
}

/// Level used to count first-stage rejections in the adaptive procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstStageLevel<T> {
    /// Count BH-adjusted p-values `<= q`.
    Plain(T),
    /// Count BH-adjusted p-values `<= q / (1 + q)`.
    TwoStage(T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueSet<T> {
    pub labels: Vec<String>,
    pub raw: Vec<T>,
    pub adjusted: Vec<T>,
    pub method: FdrMethod,
}

impl<T: Real> PValueSet<T> {
    pub fn new(labels: Vec<String>, raw: Vec<T>, method: FdrMethod, level: T) -> Result<Self> {
        if labels.len() != raw.len() {
            return Err(CoreError::Dimension(format!("{} labels for {} p-values", labels.len(), raw.len())));
        }
        let adjusted = match method {
            FdrMethod::Bh => adjust_bh(&raw)?,
            FdrMethod::AdaptiveBh => adjust_adaptive_bh(&raw, level)?,
        };
        Ok(Self { labels, raw, adjusted, method })
    }
}

fn validate<T: Real>(raw: &[T]) -> Result<()> {
    match raw.iter().find(|&&p| !(p >= T::zero() && p <= T::one())) {
        Some(p) => Err(CoreError::InvalidArgument(format!("p-value {p} outside [0,1]"))),
        None => Ok(()),
    }
}

/// Step-up adjustment with multiplier `m`: sort ascending, `q_(j) = p_(j) m / j`,
/// running minimum from the largest rank, cap at 1, restore input order.
fn step_up<T: Real>(raw: &[T], m: T) -> Vec<T> {
    let s = raw.len();
    let mut order: Vec<usize> = (0..s).collect();
    // Stable sort keeps ties in input order, so the result does not depend on it.
    order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).unwrap());
    let mut out = vec![T::zero(); s];
    let mut running = T::one();
    for rank in (0..s).rev() {
        let i = order[rank];
        // Factor first: m / j >= 1 keeps q >= p exactly in floating point.
        let q = raw[i] * (m / T::from_usize_lossy(rank + 1));
        running = running.min(q);
        out[i] = running.min(T::one());
    }
    out
}

pub fn adjust_bh<T: Real>(raw: &[T]) -> Result<Vec<T>> {
    validate(raw)?;
    Ok(step_up(raw, T::from_usize_lossy(raw.len())))
}

pub fn adjust_adaptive_bh<T: Real>(raw: &[T], q: T) -> Result<Vec<T>> {
    adjust_adaptive_bh_with(raw, FirstStageLevel::Plain(q))
}

/// Two-step adaptive BH: `R` = first-stage BH rejections, `S0 = S - R`
/// (at least 1), then step-up with factor `S0 / j`. Falls back to plain BH
/// when `R = 0`.
pub fn adjust_adaptive_bh_with<T: Real>(raw: &[T], level: FirstStageLevel<T>) -> Result<Vec<T>> {
    let (q, cutoff) = match level {
        FirstStageLevel::Plain(q) => (q, q),
        FirstStageLevel::TwoStage(q) => (q, q / (T::one() + q)),
    };
    if !(q > T::zero() && q < T::one()) {
        return Err(CoreError::InvalidArgument(format!("FDR level must lie in (0,1), got {q}")));
    }
    let bh = adjust_bh(raw)?;
    let rejected = bh.iter().filter(|&&p| p <= cutoff).count();
    if rejected == 0 {
        return Ok(bh);
    }
    let s0 = (raw.len() - rejected).max(1);
    Ok(step_up(raw, T::from_usize_lossy(s0)))
}

/// Number of adjusted p-values at or below `q`.
pub fn rejections<T: Real>(adjusted: &[T], q: T) -> usize {
    adjusted.iter().filter(|&&p| p <= q).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn hand_example() {
        assert!(close(&adjust_bh(&[0.01, 0.02, 0.05]).unwrap(), &[0.03, 0.03, 0.05]));
        assert!(close(&adjust_bh(&[0.05, 0.01, 0.02]).unwrap(), &[0.05, 0.03, 0.03]));
    }

    #[test]
    fn edge_cases() {
        assert_eq!(adjust_bh(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0; 3]);
        assert_eq!(adjust_bh(&[0.37]).unwrap(), vec![0.37]);
        assert!(adjust_bh::<f64>(&[]).unwrap().is_empty());
        assert!(adjust_bh(&[1.2]).is_err());
    }

    #[test]
    fn adaptive_hand_example() {
        // BH: (0.002, 0.002, 0.9, 0.9) -> R = 2, S0 = 2.
        // Factor 2/j: (0.002, 0.001, 0.5333, 0.45) -> running min -> (0.001, 0.001, 0.45, 0.45).
        let adj = adjust_adaptive_bh(&[0.001, 0.001, 0.8, 0.9], 0.10).unwrap();
        assert!(close(&adj, &[0.001, 0.001, 0.45, 0.45]), "{adj:?}");
    }

    #[test]
    fn adaptive_falls_back_without_rejections() {
        let raw = [0.3, 0.5, 0.9];
        assert_eq!(adjust_adaptive_bh(&raw, 0.1).unwrap(), adjust_bh(&raw).unwrap());
    }

    #[test]
    fn two_stage_level_is_stricter() {
        // BH-adjusted 0.095 rejects at 0.10 but not at 0.10/1.1.
        let raw = [0.0475, 0.5];
        let plain = adjust_adaptive_bh_with(&raw, FirstStageLevel::Plain(0.10)).unwrap();
        let two = adjust_adaptive_bh_with(&raw, FirstStageLevel::TwoStage(0.10)).unwrap();
        assert_eq!(two, adjust_bh(&raw).unwrap());
        assert!(plain[0] < two[0]);
    }
}
