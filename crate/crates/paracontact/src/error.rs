use thiserror::Error;

/// Errors raised by the geometry layer.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("base dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("tangential part must be orthogonal to u (t[0] = {0})")]
    NotTangential(f64),

    #[error("vector u is not unit (|u|^2 = {0})")]
    NonUnit(f64),

    #[error("a + c + d vanishes, the direction u^h is degenerate")]
    DegenerateDirection,

    #[error("metric is degenerate: {0}")]
    DegenerateMetric(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("degenerate plane (G(A,A)G(B,B) - G(A,B)^2 = {0:e})")]
    DegeneratePlane(f64),

    #[error("invalid curvature model: {0}")]
    InvalidModel(String),

    #[error("inconsistent result in {what}: residual {residual:e}")]
    Inconsistent { what: String, residual: f64 },

    #[error("structure is Sasakian (kappa = {0}), deformation needs kappa < 1")]
    Sasakian(f64),

    #[error("could not read curvature model: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
