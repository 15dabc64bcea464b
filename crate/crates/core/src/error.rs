use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported scoring rule: {0}")]
    UnsupportedRule(String),

    #[error("all scores are zero; multiplicative normalization is undefined")]
    DegenerateNormalization,

    #[error("report grid has {points} points, limit is {limit}")]
    GridTooLarge { points: f64, limit: usize },

    #[error("{states} win-count states exceed the exact-evaluation limit {limit}")]
    StateSpaceTooLarge { states: f64, limit: usize },

    #[error("accuracy gap is zero: {0}")]
    DegenerateGap(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
