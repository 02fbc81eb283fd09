use thiserror::Error;

/// Errors produced anywhere in the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} exceeds capacity: {requested} > {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The input violates an algorithm's structural precondition
    /// (e.g. an isotropic subspace of dimension larger than `n`).
    #[error("impossible input: {0}")]
    ImpossibleInput(String),

    /// A learner or tester detected that its input state broke the promise
    /// it was called under.
    #[error("promise violation: {0}")]
    PromiseViolation(String),

    #[error("insufficient copies: requested {requested}, {available} remaining")]
    InsufficientCopies { requested: u64, available: u64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_same_n(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
