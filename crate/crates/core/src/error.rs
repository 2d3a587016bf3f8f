use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin quantum number {0}: 2j must be a non-negative integer")]
    InvalidSpin(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode {mode} out of range for a {modes}-mode state")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("mode {0} appears more than once")]
    RepeatedMode(usize),

    #[error("mode set must not be empty")]
    EmptyModeSet,

    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("observable on mode {0} has a degenerate spectrum")]
    DegenerateObservable(usize),

    #[error("assembled map is not proportional to a unitary (deviation {0:e})")]
    NonUnitaryMap(f64),

    #[error("singular matrix")]
    Singular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
