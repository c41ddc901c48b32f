//! Stationarity transforms applied to level series.

use serde::{Deserialize, Serialize};

use crate::error::{RealtimeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Level,
    /// x_t - x_{t-1}
    Diff,
    /// 100 (x_t / x_{t-1} - 1)
    PctGrowth,
}

impl Transform {
    /// PAYEMS is differenced; output and price levels become growth rates;
    /// indexes (CFNAI, NFCI, ADS, ...) are used as published.
    pub fn default_for(variable: &str) -> Transform {
        match variable {
            "PAYEMS" => Transform::Diff,
            "GDPC1" | "INDPRO" | "CPIAUCSL" => Transform::PctGrowth,
            _ => Transform::Level,
        }
    }

    pub fn needs_previous(&self) -> bool {
        !matches!(self, Transform::Level)
    }

    pub fn parse(s: &str) -> Option<Transform> {
        match s {
            "level" => Some(Transform::Level),
            "diff" => Some(Transform::Diff),
            "pct_growth" => Some(Transform::PctGrowth),
            _ => None,
        }
    }

    /// One transformed observation from the current and previous level.
    pub fn apply(&self, current: f64, previous: Option<f64>) -> Result<f64> {
        match (self, previous) {
            (Transform::Level, _) => Ok(current),
            (_, None) => Err(RealtimeError::Transform("previous observation required".into())),
            (Transform::Diff, Some(p)) => Ok(current - p),
            (Transform::PctGrowth, Some(p)) => {
                if p == 0.0 {
                    return Err(RealtimeError::Transform("zero denominator in growth rate".into()));
                }
                Ok(100.0 * (current - p) / p)
            }
        }
    }
}

/// Transforms a level series; the output is one shorter for Diff and PctGrowth.
pub fn transform(t: Transform, levels: &[f64]) -> Result<Vec<f64>> {
    if levels.len() < 2 {
        return Err(RealtimeError::Transform("at least two observations required".into()));
    }
    match t {
        Transform::Level => Ok(levels.to_vec()),
        _ => levels.windows(2).map(|w| t.apply(w[1], Some(w[0]))).collect(),
    }
}

/// Rebuilds levels from the first level and the transformed values.
pub fn inverse(t: Transform, first_level: f64, transformed: &[f64]) -> Vec<f64> {
    match t {
        Transform::Level => transformed.to_vec(),
        Transform::Diff => std::iter::once(first_level)
            .chain(transformed.iter().scan(first_level, |acc, d| {
                *acc += d;
                Some(*acc)
            }))
            .collect(),
        Transform::PctGrowth => std::iter::once(first_level)
            .chain(transformed.iter().scan(first_level, |acc, g| {
                *acc *= 1.0 + g / 100.0;
                Some(*acc)
            }))
            .collect(),
    }
}
