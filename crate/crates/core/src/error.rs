use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no observations in sample")]
    NoObservations,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("truncation cap {cap} lies below the boundary maximum {max}")]
    CapBelowBoundary { cap: f64, max: f64 },

    #[error("invalid alternative: {0}")]
    InvalidAlternative(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
