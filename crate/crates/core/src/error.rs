use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A lattice point or cutoff lies outside the stored mode set.
    #[error("range error: {0}")]
    Range(String),
    /// A grid is too coarse to represent the requested product exactly.
    #[error("aliasing error: grid size {grid} is below the exact size {required}")]
    Aliasing { grid: usize, required: usize },
    /// A lattice, grid or table would exceed the configured size limits.
    #[error("resource error: {0}")]
    Resource(String),
    /// A Monte Carlo estimator has no usable weights.
    #[error("estimation error: {0}")]
    Estimation(String),
    /// The adaptive integrator could not keep the local error within tolerance.
    #[error("stiffness error: step size underflow at t = {t} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },
    /// Malformed serialized data.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
