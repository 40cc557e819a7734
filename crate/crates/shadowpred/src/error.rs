use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto stable exit codes:
/// parse/usage errors exit 2, data/format errors exit 3, numeric guards exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("numeric guard: {0}")]
    Guard(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
