//! Preparation of the normalized state `f(A)|b> / ||f(A)|b>||` by the
//! trapezoidal rule on Cauchy's integral formula.
//!
//! The quantum algorithm is executed on exact statevectors at desk scale:
//! the M shifted resolvent systems are stacked into one block-diagonal system,
//! the quadrature weights are applied by a linear-combination-of-unitaries
//! operator, the k-register is averaged by Hadamard gates and the result is
//! post-selected. Every bound the construction relies on is evaluated next to
//! the measured quantity it controls.
//!
//! Module map:
//! - [`numkernel`]: dense complex linear algebra, analytic function
//!   descriptions and the power-series reference for `f(A)b`.
//! - [`contour`]: quadrature nodes, `f_M(A)b` and its error bound.
//! - [`blocksys`]: the block-diagonal system, sparse-access oracles with query
//!   counters, norm bounds, scaling and the Hermitian dilation.
//! - [`lcu`]: the weighting unitary and its constants.
//! - [`pipeline`]: the end-to-end run, parameter selection and certificates.
//! - [`verify`]: named invariant checks used by the `verify` command.
//! - [`cli`]: command-line front end.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocksys;
pub mod cli;
pub mod contour;
pub mod error;
pub mod lcu;
pub mod numkernel;
pub mod pipeline;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default cap on `N * M`, the dimension of the stacked linear system.
pub const DEFAULT_SIZE_CAP: usize = 1 << 14;

/// Size cap for the stacked system, overridable through `MATFUNC_SIZE_CAP`.
pub fn size_cap() -> usize {
    std::env::var("MATFUNC_SIZE_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_SIZE_CAP)
}

pub(crate) fn check_power_of_two(name: &'static str, value: usize) -> Result<()> {
    if value.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo { name, value })
    }
}
