use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("series cannot be certified: |z| or ||A|| = {norm} is not below the radius {radius}")]
    DivergentSeries { norm: f64, radius: f64 },

    #[error("vector norm is zero")]
    ZeroVector,

    #[error("{name} = {value} is not a power of two")]
    NotPowerOfTwo { name: &'static str, value: usize },

    #[error("bound is degenerate: geometric ratio {ratio} is not below 1")]
    DegenerateBound { ratio: f64 },

    #[error("system dimension {size} exceeds the size cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("scaling constant {c} is below 1 + 1/beta = {min}")]
    BadScale { c: f64, min: f64 },

    #[error("truncated series has no nonzero coefficient below order {order}")]
    ZeroFunction { order: usize },

    #[error("||f(A)b|| = {norm:e} is too small for the target state to be defined")]
    NullImage { norm: f64 },

    #[error("target is infeasible: {what} = {required} exceeds the cap {cap}")]
    InfeasibleTarget {
        what: &'static str,
        required: f64,
        cap: usize,
    },

    #[error("post-selection probability {prob:e} is too small")]
    NullProjection { prob: f64 },

    #[error("spectral norm of A is {norm}, which exceeds 1")]
    NormTooLarge { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
