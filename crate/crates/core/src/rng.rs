//! Seeded random instances. All randomness flows through SplitMix64 so a run
//! is reproducible from its seed.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::numkernel::{spectral_norm, ComplexMatrix, ComplexVector};
use crate::{Result, C64};

pub type SeededRng = SplitMix64;

pub fn seeded(seed: u64) -> SeededRng {
    SplitMix64::seed_from_u64(seed)
}

/// Entry with real and imaginary parts uniform on `[-1, 1)`.
pub fn random_complex(rng: &mut SeededRng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut SeededRng, n: usize) -> ComplexVector {
    (0..n).map(|_| random_complex(rng)).collect()
}

/// Random vector rescaled to unit norm.
pub fn random_unit_vector(rng: &mut SeededRng, n: usize) -> ComplexVector {
    loop {
        let v = random_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v.scale_real(1.0 / norm);
        }
    }
}

/// Random dense matrix, Hermitian if requested, rescaled to spectral norm 1.
pub fn random_matrix(rng: &mut SeededRng, n: usize, hermitian: bool) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::from_fn(n, |_, _| random_complex(rng));
    if hermitian {
        m = m.add(&m.adjoint()).scale_real(0.5);
    }
    normalize_norm(&m)
}

/// Upper-triangular non-normal matrix with diagonal `lambda` and unit
/// superdiagonal, rescaled to spectral norm 1.
pub fn jordan_like(n: usize, lambda: f64) -> Result<ComplexMatrix> {
    let m = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(lambda, 0.0)
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    normalize_norm(&m)
}

fn normalize_norm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = spectral_norm(m)?;
    if s == 0.0 {
        return Ok(m.clone());
    }
    Ok(m.scale_real(1.0 / s))
}

/// A labelled random test matrix.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub matrix: ComplexMatrix,
    pub hermitian: bool,
}

/// `count` matrices cycling through `dims`, alternating Hermitian and
/// non-Hermitian, each rescaled to spectral norm 1.
pub fn instance_set(seed: u64, count: usize, dims: &[usize]) -> Result<Vec<Instance>> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|idx| {
            let n = dims[idx % dims.len()];
            let hermitian = idx % 2 == 0;
            let matrix = random_matrix(&mut rng, n, hermitian)?;
            let kind = if hermitian { "herm" } else { "gen" };
            Ok(Instance {
                label: format!("{kind}{n}-{idx}"),
                matrix,
                hermitian,
            })
        })
        .collect()
}
