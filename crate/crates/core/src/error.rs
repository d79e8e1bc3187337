use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the range where the operation is defined.
    /// The message names the violated inequality.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two sampled objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// An iterative solver stopped before meeting its tolerance.
    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: String, residual: f64 },
    /// A relation that holds for every admissible input was found violated.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
