//! Dense complex linear algebra and the power-series reference for `f(A)b`.

mod function;
mod linalg;
mod series;

pub(crate) use function::horner;
pub use function::{FunctionKind, FunctionSpec, CUSTOM_DISK_SAFETY, CUSTOM_DISK_SAMPLES};
pub use linalg::{
    inverse, lu_solve, spectral_norm, ComplexMatrix, ComplexVector, LuFactors, POWER_ITERATION_CAP,
    SPECTRAL_NORM_TOL,
};
pub use series::{
    certified_terms, normalized_distance, taylor_apply, taylor_matrix, QuantumStateView,
};
