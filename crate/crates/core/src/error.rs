use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("CSS validation failed: {0}")]
    CssValidation(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("invalid check-state tuple ({0}, {1}, {2}) for a degree-{3} variable")]
    InvalidTuple(u8, u8, u8, u8),

    #[error("variable {var} has degree {degree}; two-bit tables are defined for degree <= 3")]
    DegreeTooLarge { var: usize, degree: usize },

    #[error("empty variable set")]
    EmptySet,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
