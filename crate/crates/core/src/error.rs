use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("horizon exceeded: learner was configured for {horizon} rounds")]
    HorizonExceeded { horizon: usize },

    #[error("oracle did not converge within {iterations} iterations (last gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("loss rounds are inconsistent: {0}")]
    InconsistentRounds(String),

    #[error("no applicable bound: {0}")]
    NoBound(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
