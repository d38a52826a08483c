use thiserror::Error;

/// Errors produced by pmf construction, bound evaluation, and body validation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("masses must be non-empty")]
    EmptySupport,
    #[error("mass at support point {index} must be strictly positive and finite, got {value}")]
    InvalidMass { index: usize, value: f64 },
    #[error("masses sum to {sum}")]
    NotNormalized { sum: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{name} outside domain: {detail}")]
    Domain { name: &'static str, detail: String },
    #[error("mgf overflows: log value {log_value} exceeds the representable range")]
    MgfOverflow { log_value: f64 },
    #[error("pmf is not ultra log-concave, first violation at n = {index}")]
    NotUltraLogConcave { index: usize },
    #[error("profile has a zero at interior index {index}")]
    InteriorZero { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn param(detail: impl Into<String>) -> Self {
        Error::InvalidParameter(detail.into())
    }
}
