use alloc::string::String;

/// Errors raised by the library.
///
/// The CLI maps [`Error::Precondition`] and [`Error::InvalidArgument`] /
/// [`Error::Domain`] to exit code 2 and the two failure variants to exit code 3.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of one of the algorithms does not hold for the inputs.
    #[error("hypothesis violated ({theorem}): {message}")]
    Precondition {
        theorem: &'static str,
        message: String,
    },

    #[error("filter construction failed: {message} (best error {best_error:e} at degree {degree})")]
    Construction {
        message: String,
        best_error: f64,
        degree: usize,
    },

    #[error("phase solver did not converge after {iterations} iterations (best residual {best_residual:e})")]
    Solver {
        iterations: usize,
        best_residual: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
