use thiserror::Error;

#[derive(Debug, Error)]
pub enum RealtimeError {
    #[error("vintage line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{0}")]
    Vintage(String),
    #[error("transform: {0}")]
    Transform(String),
    #[error("empty design: {0}")]
    EmptyDesign(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, RealtimeError>;
