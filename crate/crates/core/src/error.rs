use std::fmt;

/// Errors surfaced by the source models, the coder, and the analytics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid model or operation parameter (bad k, order, probability row, ...).
    InvalidParameter(String),
    /// A sequence symbol is outside the alphabet.
    SymbolOutOfRange { symbol: u16, k: usize },
    /// An operation was handed counts with a different (k, order) than the sequence.
    ModelMismatch { expected: (usize, usize), got: (usize, usize) },
    /// Encoder and decoder memories diverge (warm-count fingerprints differ).
    ContextMismatch { expected: u64, got: u64 },
    /// A block failed structural validation (bad magic, version, truncated payload).
    MalformedBlock(String),
    /// An iterative numeric procedure failed to converge.
    NumericFailure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SymbolOutOfRange { symbol, k } => {
                write!(f, "symbol {symbol} out of range for alphabet of size {k}")
            }
            Error::ModelMismatch { expected, got } => write!(
                f,
                "model mismatch: expected (k, order) = {expected:?}, got {got:?}"
            ),
            Error::ContextMismatch { expected, got } => write!(
                f,
                "context fingerprint mismatch: block was encoded with {expected:#018x}, decoder holds {got:#018x}"
            ),
            Error::MalformedBlock(msg) => write!(f, "malformed block: {msg}"),
            Error::NumericFailure(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
