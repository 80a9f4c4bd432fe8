use thiserror::Error;

/// Errors raised by the solver modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The survivor function vanishes at `θ`; grids must be truncated below it.
    #[error("upper-support error at theta = {0}: survivor function is zero, truncate the grid")]
    UpperSupport(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The implicit-function step of the comparative statics is singular.
    #[error("ill-posed: {0}")]
    IllPosed(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
