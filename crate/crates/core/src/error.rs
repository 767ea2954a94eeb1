//! Error type shared by every module.
//!
//! The variants mirror the failure classes surfaced by the CLI:
//! domain violations (bad modulus, class not coprime, s out of range),
//! resource-budget rejections (sieve or enumeration too large), precision
//! shortfalls (a result cannot honestly carry the digits asked for), and
//! cross-check failures (two independent evaluation paths disagree beyond
//! their combined error bounds — always a bug, never ignored).

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed a configured resource budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The requested accuracy cannot be certified with the given parameters.
    #[error("precision shortfall: {0}")]
    Precision(String),

    /// Two independent evaluation paths disagree beyond combined error bounds.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    /// An I/O error from table export.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for domain errors.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
