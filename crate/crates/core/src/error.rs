use alloc::string::String;

/// Errors raised by the numerical routines.
///
/// Variants split into input problems (bad specs, malformed sequences, windows
/// that cannot support a fit) and numerical failures (iterations that did not
/// converge). [`Error::is_numerical`] tells them apart.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid box specification: {0}")]
    InvalidSpec(String),
    #[error("invalid volume sequence: {0}")]
    InvalidSequence(String),
    #[error("inconsistent sequence: V_{index} = 0 but V_{next} > 0", next = .index + 1)]
    InconsistentSequence { index: usize },
    #[error("invalid window [{lo}, {hi}]: {reason}")]
    InvalidWindow { lo: usize, hi: usize, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },
}

impl Error {
    /// True for failures of an iterative method, false for rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
