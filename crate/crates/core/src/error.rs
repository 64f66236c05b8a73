use std::fmt;

use thiserror::Error;

/// Location-tagged failure from the Matrix Market reader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column of the offending token (1 when the whole line is at fault).
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("diagonal entry {} is zero", .0 + 1)]
    ZeroDiagonal(usize),

    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("principal block is numerically singular")]
    SingularBlock,

    #[error("bad index set: {0}")]
    BadIndexSet(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero pivot at elimination step {}", .0 + 1)]
    ZeroPivot(usize),

    #[error("matrix is reducible")]
    NotIrreducible,

    #[error("angle {0} is outside [0, 2pi)")]
    BadAngle(f64),

    #[error("unknown corpus id `{0}`")]
    BadId(String),

    #[error("unknown matrix class `{0}`")]
    BadClass(String),

    #[error("entry ({}, {}) is not finite", .row + 1, .col + 1)]
    NonFinite { row: usize, col: usize },

    #[error("matrix must have order at least 1")]
    Empty,

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
