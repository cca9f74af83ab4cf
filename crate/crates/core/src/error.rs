use thiserror::Error;

use crate::seqdsl::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported dimension {0} (at most 2 supported for grid estimation)")]
    UnsupportedDimension(usize),

    #[error("oracle inconclusive: {0}")]
    OracleInconclusive(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
