use thiserror::Error;

/// Errors produced while designing or simulating a TCM-NOMA link.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid preset: {0}")]
    InvalidPreset(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("signal set too small: have {have} unique positions, need {need}")]
    SetTooSmall { have: usize, need: usize },
    #[error("shaping target {target} exceeds set size {have} (or is not a power of two)")]
    TargetTooLarge { target: usize, have: usize },

    #[error("bipartition requires an even set of at least 4 points, got {0}")]
    OddSize(usize),
    #[error("point {0} already indexed")]
    DuplicateInsert(usize),
    #[error("point {0} not indexed")]
    MissingRemove(usize),
    #[error("neighbor index is empty")]
    EmptyIndex,
    #[error("set of {0} points is not a power of two")]
    SizeNotPowerOfTwo(usize),
    #[error("partition tree incomplete: {0}")]
    IncompleteTree(String),

    #[error("non-realizable code: {0}")]
    NonRealizable(String),
    #[error("polynomial degree {degree} exceeds register count {registers}")]
    DegreeTooHigh { degree: u32, registers: u32 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("exhaustive search too large: {0} hypotheses")]
    TooLarge(u128),
    #[error("super-state space too large: 2^{0}")]
    StateSpaceTooLarge(u32),

    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
