use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("refused: {0}")]
    Refused(String),
    #[error("delayed-response product has {count} elements, above the cap of {cap}")]
    Cap { count: String, cap: u64 },
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
