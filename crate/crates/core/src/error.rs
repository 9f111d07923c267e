use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The Riemann-Siegel evaluator is only valid for t >= 50; below that
    /// callers must switch to the Euler-Maclaurin path.
    #[error("t = {0} is below the Riemann-Siegel validity floor; use Euler-Maclaurin")]
    UseEulerMaclaurin(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
