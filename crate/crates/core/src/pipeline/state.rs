use crate::lcu::WeightingUnitary;
use crate::numkernel::ComplexVector;
use crate::{Error, Result, C64};

/// Amplitudes over `k-register (x) data register (x) ancilla`, stored at
/// index `(k N + i) L + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    nodes: usize,
    data_dim: usize,
    ancilla_dim: usize,
}

impl StateVector {
    /// Stacked system state with a trivial ancilla.
    pub fn from_stacked(x: &[C64], nodes: usize) -> Result<Self> {
        if nodes == 0 || !x.len().is_multiple_of(nodes) {
            return Err(Error::DimensionMismatch {
                expected: nodes,
                actual: x.len(),
            });
        }
        Ok(Self {
            amps: x.to_vec(),
            nodes,
            data_dim: x.len() / nodes,
            ancilla_dim: 1,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn data_dim(&self) -> usize {
        self.data_dim
    }
    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Appends an ancilla of dimension `order` in state `|0>`.
    pub fn extend_ancilla(&self, order: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len() * order];
        for (idx, z) in self.amps.iter().enumerate() {
            amps[idx * order] = *z;
        }
        Self {
            amps,
            nodes: self.nodes,
            data_dim: self.data_dim,
            ancilla_dim: order,
        }
    }

    /// Applies `U_k` to the ancilla of every `(k, i)` slice.
    pub fn apply_weighting(&mut self, u: &WeightingUnitary) -> Result<()> {
        if u.order() != self.ancilla_dim || u.nodes() != self.nodes {
            return Err(Error::DimensionMismatch {
                expected: self.ancilla_dim,
                actual: u.order(),
            });
        }
        let l = self.ancilla_dim;
        for k in 0..self.nodes {
            for i in 0..self.data_dim {
                let start = (k * self.data_dim + i) * l;
                let slice = &mut self.amps[start..start + l];
                let out = u.apply_block(k, slice);
                slice.copy_from_slice(&out);
            }
        }
        Ok(())
    }

    /// Hadamard gate on every qubit of the k-register.
    pub fn hadamard_k(&mut self) {
        let stride = self.data_dim * self.ancilla_dim;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut h = 1;
        while h < self.nodes {
            for base in (0..self.nodes).step_by(2 * h) {
                for k in base..base + h {
                    for off in 0..stride {
                        let (p, q) = (k * stride + off, (k + h) * stride + off);
                        let (a, b) = (self.amps[p], self.amps[q]);
                        self.amps[p] = (a + b) * s;
                        self.amps[q] = (a - b) * s;
                    }
                }
            }
            h *= 2;
        }
    }

    /// Data-register component with `k = 0` and ancilla `|0>`.
    pub fn success_branch(&self) -> ComplexVector {
        (0..self.data_dim)
            .map(|i| self.amps[i * self.ancilla_dim])
            .collect()
    }
}
