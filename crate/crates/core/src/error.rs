use std::fmt;

/// Errors raised by the simulation kernels.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("numerical accuracy: {what} (estimated relative error {estimate:.3e})")]
    Accuracy { what: String, estimate: f64 },
    #[error("eigensolver failed at grid point {index}")]
    Eigensolver { index: usize },
    #[error("well not found on curve {0}")]
    WellNotFound(String),
    #[error("unstable configuration: {0}")]
    Unstable(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }

    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    /// `true` for errors caused by bad inputs rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_) | Error::InvalidChannel(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
