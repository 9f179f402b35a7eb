//! Error type shared by the numeric modules.

use thiserror::Error;

/// Everything that can go wrong while building grids, taking norms, or
/// running the solver. Variants carry enough context to name the violated
/// precondition in user-facing messages.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was handed a parameter outside its domain.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        /// Which argument was rejected.
        name: &'static str,
        /// Why it was rejected.
        reason: String,
    },

    /// Two grid functions that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A sample or intermediate value came out non-finite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An operation that requires a converged trajectory got something else.
    #[error("trajectory not converged: {0}")]
    NotConverged(String),

    /// An amplitude scan could not bracket the convergence threshold.
    #[error("scan range exhausted: {0}")]
    ScanRange(String),

    /// Filesystem trouble while emitting artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for the ubiquitous invalid-parameter case.
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
