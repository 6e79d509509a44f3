use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every message names the precondition that was violated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid kernel spec: {0}")]
    KernelSpec(String),
    #[error("sample file {path}: {reason}")]
    SampleFile { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    /// True for errors caused by the file system rather than by the inputs'
    /// mathematical content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::SampleFile { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
