use alloc::string::String;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors surfaced by generators, filter designs and measurements.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A filter design could not be realized (e.g. the result is unstable).
    #[error("design failure: {0}")]
    DesignFailure(String),

    /// A signal was fed to a stage designed for a different sample rate.
    #[error("sample rate mismatch: filter designed for {expected} Hz, signal is {actual} Hz")]
    RateMismatch { expected: f64, actual: f64 },

    /// A statistic is undefined for the given input (e.g. zero variance).
    #[error("undefined statistic: {0}")]
    UndefinedStatistic(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl core::fmt::Display) -> Self {
        Error::InvalidArgument(alloc::format!("{msg}"))
    }

    pub(crate) fn design(msg: impl core::fmt::Display) -> Self {
        Error::DesignFailure(alloc::format!("{msg}"))
    }
}
