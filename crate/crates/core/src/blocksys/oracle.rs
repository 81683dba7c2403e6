use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use super::BlockDiagonal;
use crate::contour::unit_root;
use crate::numkernel::{ComplexMatrix, ComplexVector, QuantumStateView};
use crate::{check_power_of_two, Error, Result, C64};

/// Number of calls made to each oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounts {
    /// entry oracle
    pub oa: u64,
    /// position oracle
    pub onu: u64,
    /// state preparation for the right-hand side
    pub pb: u64,
}

#[derive(Debug, Default)]
struct Counters {
    entry: AtomicU64,
    position: AtomicU64,
    rhs: AtomicU64,
}

impl Counters {
    fn snapshot(&self) -> QueryCounts {
        QueryCounts {
            oa: self.entry.load(Ordering::Relaxed),
            onu: self.position.load(Ordering::Relaxed),
            pb: self.rhs.load(Ordering::Relaxed),
        }
    }

    fn reset(&self) {
        self.entry.store(0, Ordering::Relaxed);
        self.position.store(0, Ordering::Relaxed);
        self.rhs.store(0, Ordering::Relaxed);
    }
}

/// Classical model of sparse access to `A` and state preparation of `|b>`.
///
/// Each column keeps the row indices of its structural nonzeros in increasing
/// order. Diagonal entries are always structural, even when numerically zero.
#[derive(Debug)]
pub struct SparseOracle {
    dim: usize,
    sparsity: usize,
    columns: Vec<Vec<(usize, C64)>>,
    rhs: QuantumStateView,
    counters: Counters,
}

impl SparseOracle {
    pub fn new(a: &ComplexMatrix, b: &[C64]) -> Result<Self> {
        let n = a.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        let rhs = QuantumStateView::normalize(&ComplexVector::from(b.to_vec()))?;
        let mut columns = vec![Vec::new(); n];
        let mut row_counts = vec![0usize; n];
        for (j, col) in columns.iter_mut().enumerate() {
            for i in 0..n {
                let v = a[(i, j)];
                if i == j || v != C64::new(0.0, 0.0) {
                    col.push((i, v));
                    row_counts[i] += 1;
                }
            }
        }
        let sparsity = columns
            .iter()
            .map(Vec::len)
            .chain(row_counts.iter().copied())
            .max()
            .unwrap_or(0);
        Ok(Self {
            dim: n,
            sparsity,
            columns,
            rhs,
            counters: Counters::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `d`, the largest number of structural nonzeros in any row or column.
    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    /// Number of structural nonzeros in column `j`.
    pub fn column_len(&self, j: usize) -> usize {
        self.columns[j].len()
    }

    /// `A_ij`; zero outside the pattern.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.counters.entry.fetch_add(1, Ordering::Relaxed);
        let col = &self.columns[j];
        match col.binary_search_by_key(&i, |&(r, _)| r) {
            Ok(p) => col[p].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Row index of the `l`-th structural nonzero of column `j`.
    pub fn position(&self, j: usize, l: usize) -> Option<usize> {
        self.counters.position.fetch_add(1, Ordering::Relaxed);
        self.columns[j].get(l).map(|&(r, _)| r)
    }

    pub fn rhs_state(&self) -> QuantumStateView {
        self.counters.rhs.fetch_add(1, Ordering::Relaxed);
        self.rhs.clone()
    }

    pub fn counts(&self) -> QueryCounts {
        self.counters.snapshot()
    }

    pub fn reset_counts(&self) {
        self.counters.reset()
    }
}

/// Access to `A'` built on top of a [`SparseOracle`] for `A`.
///
/// Indices are `(k, i)` pairs, block `k` and row or column `i` within it.
#[derive(Debug)]
pub struct BlockOracle<'a> {
    base: &'a SparseOracle,
    nodes: usize,
    beta: f64,
    counters: Counters,
}

impl<'a> BlockOracle<'a> {
    pub fn new(base: &'a SparseOracle, nodes: usize, beta: f64) -> Result<Self> {
        check_power_of_two("M", nodes)?;
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must be positive"
            )));
        }
        Ok(Self {
            base,
            nodes,
            beta,
            counters: Counters::default(),
        })
    }

    pub fn base(&self) -> &SparseOracle {
        self.base
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn dim(&self) -> usize {
        self.nodes * self.base.dim()
    }

    /// `delta_{k,k'} (delta_{ij} e^{i theta_k} - A_ij / beta)`.
    ///
    /// Off-diagonal blocks answer zero without touching the base oracle; a
    /// diagonal-block query costs exactly one base entry query.
    pub fn entry(&self, (k, i): (usize, usize), (k2, j): (usize, usize)) -> C64 {
        self.counters.entry.fetch_add(1, Ordering::Relaxed);
        if k != k2 {
            return C64::new(0.0, 0.0);
        }
        let a = self.base.entry(i, j) * (1.0 / self.beta);
        if i == j {
            unit_root(k, self.nodes) - a
        } else {
            -a
        }
    }

    /// `(k, nu(j, l))` for column `(k, j)`.
    pub fn position(&self, (k, j): (usize, usize), l: usize) -> Option<(usize, usize)> {
        self.counters.position.fetch_add(1, Ordering::Relaxed);
        self.base.position(j, l).map(|row| (k, row))
    }

    /// `(H^{(x)m} |0^m>) (x) |b>`, one use of the base state preparation.
    pub fn rhs_state(&self) -> QuantumStateView {
        self.counters.rhs.fetch_add(1, Ordering::Relaxed);
        let b = self.base.rhs_state();
        let amp = 1.0 / (self.nodes as f64).sqrt();
        let stacked: ComplexVector = (0..self.nodes)
            .flat_map(|_| b.amplitudes().iter().map(move |z| z * amp))
            .collect();
        QuantumStateView::normalize(&stacked).expect("stacked rhs of a unit vector is nonzero")
    }

    /// Queries made to this oracle (not to the base).
    pub fn counts(&self) -> QueryCounts {
        self.counters.snapshot()
    }

    /// Reads every diagonal block through the position and entry oracles.
    pub fn read_blocks(&self) -> Result<BlockDiagonal> {
        let n = self.base.dim();
        let mut blocks = Vec::with_capacity(self.nodes);
        for k in 0..self.nodes {
            let mut blk = ComplexMatrix::zeros(n);
            for j in 0..n {
                for l in 0..self.base.sparsity() {
                    match self.position((k, j), l) {
                        Some((_, i)) => blk[(i, j)] = self.entry((k, i), (k, j)),
                        None => break,
                    }
                }
            }
            blocks.push(blk);
        }
        BlockDiagonal::new(blocks)
    }
}
