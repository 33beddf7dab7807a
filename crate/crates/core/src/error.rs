use thiserror::Error;

/// Errors raised by code construction, decoding and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least two codewords, got {0}")]
    TooFewCodewords(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target d_min {target} unreachable: achieved {achieved} at length {length}")]
    DesignFailed {
        target: usize,
        achieved: usize,
        length: usize,
    },

    #[error("length class {length} needs {needed} codewords but the code has only {capacity}")]
    CapacityExceeded {
        length: usize,
        needed: usize,
        capacity: usize,
    },

    #[error("codebook invariant violated: {0}")]
    InvariantViolation(String),

    #[error("unknown ModCod id {0}")]
    UnknownModCod(u32),

    #[error("empty codebook")]
    EmptyCodebook,

    #[error("unsupported constellation size {0}")]
    UnsupportedConstellation(usize),

    #[error("observation too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("target CER {target} not bracketed in [{lo_db}, {hi_db}] dB")]
    NotBracketed { target: f64, lo_db: f64, hi_db: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
