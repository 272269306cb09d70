use thiserror::Error;

/// Errors raised by exact arithmetic, kernel evaluation and the scalar-product
/// machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// The reduced rational function has a genuine pole at ε = 0.
    #[error("rational function has a pole at eps = 0")]
    PoleAtZero,

    /// A truncated series lost the coefficient that was asked for.
    #[error("series precision exhausted")]
    PrecisionExhausted,

    #[error("interpolation points are not pairwise distinct")]
    DuplicatePoints,

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    /// A kernel was evaluated at one of its singular differences.
    #[error("pole of {kernel}({left}, {right})")]
    Pole { kernel: &'static str, left: String, right: String },

    #[error("no value of {function} supplied at {at}")]
    MissingRValue { function: &'static str, at: String },

    #[error("cannot choose {k} elements out of {n}")]
    BadCardinality { n: usize, k: usize },

    #[error("cardinality mismatch: {0}")]
    CardinalityMismatch(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("Omega_{pivot} vanishes; admissible pivots are {admissible:?}")]
    ZeroPivot { pivot: usize, admissible: Vec<usize> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
