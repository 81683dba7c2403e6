//! The stacked system `A' x' = b'` with blocks `e^{i theta_k} I - A/beta`,
//! its access oracles, norm bounds, scaling and the Hermitian dilation.

pub mod io;
mod oracle;

pub use oracle::{BlockOracle, QueryCounts, SparseOracle};

use crate::contour::shifted_block;
use crate::numkernel::{lu_solve, ComplexMatrix, ComplexVector, LuFactors};
use crate::{check_power_of_two, size_cap, Error, Result, C64};

/// Default scaling constant `c` for `A'/c`.
pub const DEFAULT_SCALE: f64 = 2.0;

/// Block-diagonal matrix kept as its diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonal {
    blocks: Vec<ComplexMatrix>,
}

impl BlockDiagonal {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let n = blocks.first().map(|b| b.dim()).unwrap_or(0);
        if let Some(bad) = blocks.iter().find(|b| b.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.dim(),
            });
        }
        Ok(Self { blocks })
    }

    /// Blocks `e^{i theta_k} I - A/beta` for `k = 0..M`.
    pub fn shifted(a: &ComplexMatrix, beta: f64, nodes: usize) -> Result<Self> {
        check_power_of_two("M", nodes)?;
        Ok(Self {
            blocks: (0..nodes)
                .map(|k| shifted_block(a, beta, k, nodes))
                .collect(),
        })
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.blocks.first().map(|b| b.dim()).unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.num_blocks() * self.block_dim()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.scale_real(s)).collect(),
        }
    }

    /// Dense `NM x NM` matrix, subject to the size cap.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let (n, dim) = (self.block_dim(), self.dim());
        let cap = size_cap();
        if dim > cap {
            return Err(Error::SizeCap { size: dim, cap });
        }
        let mut out = ComplexMatrix::zeros(dim);
        for (k, blk) in self.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out[(k * n + i, k * n + j)] = blk[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Solves block by block; identical to a dense solve of the assembled matrix.
    pub fn solve(&self, rhs: &[C64]) -> Result<ComplexVector> {
        let n = self.block_dim();
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rhs.len(),
            });
        }
        let mut out = Vec::with_capacity(rhs.len());
        for (k, blk) in self.blocks.iter().enumerate() {
            let xk = LuFactors::new(blk)?.solve(&rhs[k * n..(k + 1) * n])?;
            out.extend_from_slice(&xk);
        }
        Ok(out.into())
    }
}

/// Dense `A'` with blocks `e^{i theta_k} I_N - A/beta`.
pub fn assemble_blockdiag(a: &ComplexMatrix, beta: f64, nodes: usize) -> Result<ComplexMatrix> {
    check_power_of_two("M", nodes)?;
    let cap = size_cap();
    let size = a.dim() * nodes;
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }
    BlockDiagonal::shifted(a, beta, nodes)?.to_dense()
}

/// `b' = (1, ..., 1)^T (x) b`.
pub fn assemble_rhs(b: &[C64], nodes: usize) -> Result<ComplexVector> {
    check_power_of_two("M", nodes)?;
    Ok(b.iter().copied().cycle().take(b.len() * nodes).collect())
}

/// `A'/c`; requires `c >= 1 + 1/beta` so that `||A'/c|| <= 1`.
pub fn scale_system(aprime: &ComplexMatrix, c: f64, beta: f64) -> Result<ComplexMatrix> {
    let min = 1.0 + 1.0 / beta;
    if !(c >= min) {
        return Err(Error::BadScale { c, min });
    }
    Ok(aprime.scale_real(1.0 / c))
}

/// `[[0, A], [A^H, 0]]` and `(b, 0)`.
pub fn hermitian_dilation(a: &ComplexMatrix, b: &[C64]) -> Result<(ComplexMatrix, ComplexVector)> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut h = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            h[(i, n + j)] = a[(i, j)];
            h[(n + j, i)] = a[(i, j)].conj();
        }
    }
    let mut rhs = ComplexVector::zeros(2 * n);
    rhs[..n].copy_from_slice(b);
    Ok((h, rhs))
}

/// Solves `A x = b` through the dilated system and returns the lower block.
pub fn solve_via_dilation(a: &ComplexMatrix, b: &[C64]) -> Result<ComplexVector> {
    let (h, rhs) = hermitian_dilation(a, b)?;
    let sol = lu_solve(&h, &rhs)?;
    Ok(sol[a.dim()..].to_vec().into())
}

/// Bounds on `||A'||`, `||A'^{-1}||` and `kappa_{A'}` for `||A|| <= 1 < beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionBounds {
    /// `1 + 1/beta`
    pub norm: f64,
    /// `(1 - 1/beta)^{-1}`, which is also `kappa'`
    pub inverse_norm: f64,
    /// `2 / (1 - 1/beta) = 2 kappa'`
    pub condition: f64,
}

pub fn condition_bounds(beta: f64) -> Result<ConditionBounds> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must exceed 1"
        )));
    }
    let inv = 1.0 / beta;
    Ok(ConditionBounds {
        norm: 1.0 + inv,
        inverse_norm: 1.0 / (1.0 - inv),
        condition: 2.0 / (1.0 - inv),
    })
}
