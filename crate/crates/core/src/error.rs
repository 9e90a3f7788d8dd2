use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (supported: 1, 2)")]
    UnsupportedDimension(usize),

    #[error("{what} is only available on the line (dim 1), got dim {dim}")]
    LineOnly { what: &'static str, dim: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("set is not aligned to the dyadic grid of level {level}")]
    NotGridAligned { level: i32 },

    #[error("point {x} is a jump point of the density; the transform is undefined there")]
    JumpPoint { x: f64 },

    #[error("weight is not in A_{p}: {reason}")]
    NotInAp { p: f64, reason: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("root bracketing failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
