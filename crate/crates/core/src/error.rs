use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} would need {requested} but the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        requested: String,
        cap: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer amplitude overflow")]
    Overflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("tightness condition not met: {0}")]
    NotTight(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn cap(what: &'static str, requested: impl ToString, cap: impl ToString) -> Self {
        Error::CapExceeded {
            what,
            requested: requested.to_string(),
            cap: cap.to_string(),
        }
    }
}
