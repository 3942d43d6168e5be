use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("not log-convex: quotient decreases at index {index}")]
    NotLogConvex { index: usize },
    #[error("not normalized: need 1 = M_0 <= M_1")]
    NotNormalized,
    #[error("inconclusive tail: {0}")]
    InconclusiveTail(String),
    #[error("untrusted associated weight: {0}")]
    Untrusted(String),
    #[error("hypothesis ({item}) violated: {detail}")]
    Hypothesis { item: &'static str, detail: String },
    #[error("growth certificate failed: {0}")]
    Certificate(String),
    #[error("search horizon exceeded: {0}")]
    Horizon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
