use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    Asymmetric { residual: f64 },

    #[error("matrix is not positive semi-definite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("point lies off the affine range (residual {residual:.3e})")]
    OffRange { residual: f64 },

    #[error("unknown built-in ensemble `{0}`")]
    UnknownBuiltin(String),

    #[error("affine dimension {dim} exceeds facet enumeration limit {limit}")]
    HullDimension { dim: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
