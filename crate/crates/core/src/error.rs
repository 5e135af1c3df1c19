use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chebyshev map input {0} lies outside [-1, 1]")]
    Domain(f64),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("unsupported dimension {0}; expected 2 or 3")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),
    #[error("expected {expected} angles for dimension {dim}, got {found}")]
    AngleCount { dim: usize, expected: usize, found: usize },
    #[error("keystream exhausted: need state {needed}, have {available}")]
    KeystreamExhausted { needed: usize, available: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid permutation plan: {0}")]
    InvalidPlan(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate sphere: radius {0} must be positive")]
    DegenerateSphere(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
