use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("sentence {sentence_id}: {message}")]
    BadTree { sentence_id: String, message: String },
    #[error("document {doc_id}: missing or invalid date")]
    BadDate { doc_id: String },
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("topics: {0}")]
    Topics(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, TextError>;
