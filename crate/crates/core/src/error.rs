use thiserror::Error;

/// Errors produced by the solver, generators and studies.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed in a way the caller can act on
    /// (e.g. circulant embedding not nonnegative definite).
    #[error("internal error: {0}")]
    Internal(String),

    /// A Monte Carlo run produced a non-finite state.
    #[error("run error in sample {sample} at resolution {resolution}: {message}")]
    Run {
        sample: usize,
        resolution: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
