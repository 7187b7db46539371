use crate::manifold::ManifoldId;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("manifold mismatch: expected {expected}, found {found}")]
    ManifoldMismatch { expected: ManifoldId, found: ManifoldId },

    #[error("invalid point on {manifold}: {reason}")]
    InvalidPoint { manifold: ManifoldId, reason: String },

    #[error("invalid tangent vector on {manifold}: {reason}")]
    InvalidTangent { manifold: ManifoldId, reason: String },

    #[error("tangent vectors have different base points")]
    BaseMismatch,

    #[error("point lies on the cut locus of the base point ({0})")]
    CutLocus(String),

    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("eigenvalue {value:e} below floor {floor:e}")]
    EigenvalueFloor { value: f64, floor: f64 },

    #[error("empty data set")]
    EmptyData,

    #[error("need {needed} distinct points, found {found}")]
    InsufficientDistinct { needed: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weights must be nonnegative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),

    #[error("unsupported manifold for this operation: {0}")]
    UnsupportedManifold(ManifoldId),

    #[error("rejection sampler acceptance rate {rate:.4} below 0.1")]
    LowAcceptance { rate: f64 },

    #[error("no traffic sample within the kernel radius of ({x}, {y})")]
    EmptyKernel { x: f64, y: f64 },

    #[error("{skipped} of {total} positions had an empty kernel")]
    TooManySkipped { skipped: usize, total: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// I/O failure annotated with the offending path.
    pub fn io_at(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    pub(crate) fn invalid_point(manifold: ManifoldId, reason: impl Into<String>) -> Self {
        Error::InvalidPoint { manifold, reason: reason.into() }
    }

    pub(crate) fn invalid_tangent(manifold: ManifoldId, reason: impl Into<String>) -> Self {
        Error::InvalidTangent { manifold, reason: reason.into() }
    }

    /// True for failures caused by ill-conditioned numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::LowAcceptance { .. } | Error::CutLocus(_) | Error::EigenvalueFloor { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
