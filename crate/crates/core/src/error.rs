use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("design matrix is rank deficient (pivot failed at column {column})")]
    RankDeficient { column: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{solver} did not converge after {iterations} iterations")]
    NonConvergence { solver: &'static str, iterations: usize },
    #[error("not enough observations: need {needed}, have {have}")]
    TooFewObservations { needed: usize, have: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
}

pub type Result<T> = std::result::Result<T, CoreError>;
