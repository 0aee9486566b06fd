use thiserror::Error;

use crate::matrix::MatrixError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("refusing to run: {0}")]
    GuardExceeded(String),
    #[error("no violation: {0}")]
    NoViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
