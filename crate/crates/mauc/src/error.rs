//! Command failures and their process exit codes.

use std::fmt;

/// Anything that stops a run, sorted by the exit code it maps to.
#[derive(Debug)]
pub enum RunError {
    /// Unusable arguments or config. Exit code 2.
    Usage(String),
    /// A computation failed or produced an unusable number. Exit code 3.
    Numeric(String),
    /// The round-trip gate found failures. Exit code 4.
    Fuzz(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Fuzz(_) => 4,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(msg) => write!(f, "usage error: {msg}"),
            RunError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            RunError::Fuzz(msg) => write!(f, "round-trip failure: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<mauc_core::Error> for RunError {
    fn from(e: mauc_core::Error) -> Self {
        match e {
            mauc_core::Error::InvalidParameter(msg) => RunError::Usage(msg),
            other => RunError::Numeric(other.to_string()),
        }
    }
}
