use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EjaError {
    #[error("algebra mismatch: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },

    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinates must be finite")]
    NonFinite,

    #[error("cannot parse algebra descriptor {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("element is not an idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("point is not a member of the set")]
    NotMember,

    #[error("operation not supported for set variant {0}")]
    UnsupportedSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid set description: {0}")]
    InvalidSet(String),
}

pub type Result<T, E = EjaError> = std::result::Result<T, E>;
