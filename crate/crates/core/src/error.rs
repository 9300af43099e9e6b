use thiserror::Error;

/// Failures surfaced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("cannot parse number `{0}`")]
    Parse(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fixed point resolution failed: {0}")]
    FixedPoint(String),

    #[error("unsupported map: {0}")]
    Unsupported(String),

    /// A matching equation had no usable unknown; the term basis is deficient.
    #[error("singular matching step: {0}")]
    Singular(String),

    #[error("logarithm/C-degree cap exceeded: {0}")]
    CapExceeded(String),

    #[error("orbit left its basin at step {step}: {reason}")]
    Basin { step: u64, reason: String },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invalid document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
