use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("attempted to invert zero")]
    ZeroInverse,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("duplicate index {0} in index set")]
    DuplicateIndex(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operation needs a finite field")]
    NotFiniteField,
    #[error("enumeration of {count} items exceeds cap {cap}; use sampling instead")]
    EnumerationTooLarge { count: String, cap: u64 },
    #[error("{0} is not a generalized inverse")]
    NotGeneralizedInverse(&'static str),
    #[error("unsupported field for {0}")]
    UnsupportedField(&'static str),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("rank hypothesis violated: {0}")]
    RankHypothesisViolated(String),
    #[error("mode {mode} out of range for a {order}-mode tensor")]
    BadMode { mode: usize, order: usize },
    #[error("infeasible rank target: {0}")]
    InfeasibleRank(String),
    #[error("gave up after {0} attempts to hit the rank target")]
    RetriesExhausted(usize),
    #[error("face transform is not conjugate symmetric (deviation {0:e})")]
    NonConjugateSymmetric(f64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_err(msg: impl Into<String>) -> Error {
    Error::ShapeMismatch(msg.into())
}
