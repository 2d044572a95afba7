use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    Singularity(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("tolerance not met: best value {value:e}, error estimate {estimate:e}")]
    ToleranceNotMet { value: f64, estimate: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn singular(msg: impl Into<String>) -> Error {
    Error::Singularity(msg.into())
}
