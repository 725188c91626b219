use thiserror::Error;

/// Errors raised by estimators, fits and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("insufficient exceedances over u = {threshold}: need {needed}, have {have}")]
    InsufficientExceedances {
        threshold: f64,
        needed: usize,
        have: usize,
    },

    #[error("no exceedance mass above u = {0}; estimator undefined")]
    NoExceedance(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
