//! Estimation and forecast-evaluation core.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the scalar for callers that do not care.

pub mod aspa;
pub mod dist;
pub mod error;
pub mod fdr;
pub mod fluctuation;
pub mod hac;
pub mod lasso;
pub mod linalg;
pub mod loss;
pub mod metrics;
pub mod ols;
pub mod quantile;
pub mod rng;
pub mod scalar;
pub mod selection;

pub use error::{CoreError, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type CoefficientEstimate64 = ols::CoefficientEstimate<f64>;
pub type SelectionResult64 = selection::SelectionResult<f64>;
pub type LassoFit64 = lasso::LassoFit<f64>;
pub type QuantileFit64 = quantile::QuantileFit<f64>;
pub type LossPanel64 = aspa::LossPanel<f64>;
pub type TestReport64 = aspa::TestReport<f64>;
pub type PValueSet64 = fdr::PValueSet<f64>;
