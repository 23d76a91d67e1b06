//! Error type shared by all modules.

/// Errors produced by lab operations.
///
/// `Diagnostic` is reserved for mathematically meaningful failures (a sign
/// change that should exist was not found, a calibration search exhausted its
/// range); callers map it to a verification failure rather than an input
/// error.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inadmissible far field: {0}")]
    InadmissibleFarField(String),

    #[error("point outside admissible region: {0}")]
    OutOfDomain(String),

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),

    #[error("iteration did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
