//! Weighting unitary `U = (I ⊗ W'^†) V (I ⊗ W)` that places `C̃ g̃_k` on the
//! `|k>|0>` diagonal, where `g̃_k = f̃_L(beta e^{i theta_k}) e^{i theta_k}` uses the
//! series truncated to `L` terms and `C̃ = 1/alpha`, `alpha = sum_j |a_j| beta^j`.
//!
//! `W|0> = w` with `w_j = sqrt(a_j beta^j) / sqrt(alpha)`, `W'|0> = conj(w)`
//! and `V|k>|j> = e^{i theta_k (j+1)} |k>|j>`.

use std::f64::consts::PI;

use crate::contour::unit_root;
use crate::numkernel::{ComplexMatrix, ComplexVector, FunctionSpec};
use crate::{check_power_of_two, size_cap, Error, Result, C64};

/// First `L` Taylor coefficients with `alpha` and `C̃ = 1/alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    coeffs: Vec<C64>,
    beta: f64,
    alpha: f64,
    ctilde: f64,
}

impl CoeffTable {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn ctilde(&self) -> f64 {
        self.ctilde
    }

    /// `f̃_L(z) = sum_{j<L} a_j z^j`
    pub fn eval(&self, z: C64) -> C64 {
        crate::numkernel::horner(&self.coeffs, z)
    }
}

/// Truncates the series of `fs` to `order` terms on the circle `|z| = beta`.
pub fn truncate(fs: &FunctionSpec, order: usize, beta: f64) -> Result<CoeffTable> {
    check_power_of_two("L", order)?;
    if !(beta > 0.0 && beta < fs.radius()) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must satisfy 0 < beta < R = {}",
            fs.radius()
        )));
    }
    let coeffs = fs.coeffs(order);
    let alpha: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm() * beta.powi(j as i32))
        .sum();
    if !(alpha > 0.0) {
        return Err(Error::ZeroFunction { order });
    }
    Ok(CoeffTable {
        coeffs,
        beta,
        alpha,
        ctilde: 1.0 / alpha,
    })
}

/// `g̃_k = sum_j a_j beta^j e^{i theta_k (j+1)}`
pub fn weight(table: &CoeffTable, k: usize, nodes: usize) -> C64 {
    debug_assert!(k < nodes);
    table
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * table.beta.powi(j as i32) * unit_root(k * (j + 1) % nodes, nodes))
        .sum()
}

/// `e^{i phi} (I - 2 v v^† / ||v||^2)`, a unitary whose first column is a
/// prescribed unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Householder {
    phase: C64,
    v: Vec<C64>,
    vnorm_sqr: f64,
}

/// Below this `||v||^2` the reflection is dropped and `W = e^{i phi} I`.
const HOUSEHOLDER_TOL: f64 = 1e-28;

impl Householder {
    /// Unitary mapping `|0>` to the unit vector `w`.
    pub fn completing(w: &[C64]) -> Self {
        let phi = w[0].arg();
        let back = C64::from_polar(1.0, -phi);
        let mut v: Vec<C64> = w.iter().map(|x| -(x * back)).collect();
        v[0] += 1.0;
        let vnorm_sqr: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vnorm_sqr <= HOUSEHOLDER_TOL {
            v.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        }
        Self {
            phase: C64::from_polar(1.0, phi),
            v,
            vnorm_sqr,
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    fn reflect(&self, x: &mut [C64]) {
        if self.vnorm_sqr <= HOUSEHOLDER_TOL {
            return;
        }
        let proj: C64 = self.v.iter().zip(x.iter()).map(|(v, x)| v.conj() * x).sum();
        let s = proj * (2.0 / self.vnorm_sqr);
        for (xi, vi) in x.iter_mut().zip(&self.v) {
            *xi -= s * vi;
        }
    }

    pub fn apply(&self, x: &[C64]) -> ComplexVector {
        let mut y = x.to_vec();
        self.reflect(&mut y);
        y.iter_mut().for_each(|z| *z *= self.phase);
        y.into()
    }

    pub fn apply_adjoint(&self, x: &[C64]) -> ComplexVector {
        let mut y = x.to_vec();
        self.reflect(&mut y);
        let p = self.phase.conj();
        y.iter_mut().for_each(|z| *z *= p);
        y.into()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col = self.apply(&ComplexVector::basis(n, j));
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

/// Block-diagonal weighting unitary over `M` blocks of size `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightingUnitary {
    table: CoeffTable,
    nodes: usize,
    w: ComplexVector,
    w_conj: ComplexVector,
    prep: Householder,
    prep_conj: Householder,
}

/// Builds `U` for `M = nodes` quadrature nodes.
pub fn build_unitary(table: &CoeffTable, nodes: usize) -> Result<WeightingUnitary> {
    check_power_of_two("M", nodes)?;
    let scale = 1.0 / table.alpha.sqrt();
    let w: ComplexVector = table
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| (a * table.beta.powi(j as i32)).sqrt() * scale)
        .collect();
    let w_conj: ComplexVector = w.iter().map(|x| x.conj()).collect();
    let prep = Householder::completing(&w);
    let prep_conj = Householder::completing(&w_conj);
    Ok(WeightingUnitary {
        table: table.clone(),
        nodes,
        w,
        w_conj,
        prep,
        prep_conj,
    })
}

impl WeightingUnitary {
    pub fn table(&self) -> &CoeffTable {
        &self.table
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn order(&self) -> usize {
        self.table.order()
    }
    pub fn dim(&self) -> usize {
        self.nodes * self.order()
    }
    /// `W|0>`
    pub fn prep_vector(&self) -> &ComplexVector {
        &self.w
    }
    /// `W'|0>`
    pub fn conj_prep_vector(&self) -> &ComplexVector {
        &self.w_conj
    }
    pub fn prep(&self) -> &Householder {
        &self.prep
    }
    pub fn conj_prep(&self) -> &Householder {
        &self.prep_conj
    }

    /// Diagonal of `V` restricted to block `k`: `e^{i theta_k (j+1)}`.
    pub fn phases(&self, k: usize) -> Vec<C64> {
        (0..self.order())
            .map(|j| unit_root(k * (j + 1) % self.nodes, self.nodes))
            .collect()
    }

    /// `U_k x = W'^† V_k W x` on the ancilla register.
    pub fn apply_block(&self, k: usize, x: &[C64]) -> ComplexVector {
        let mut y = self.prep.apply(x);
        for (yj, p) in y.iter_mut().zip(self.phases(k)) {
            *yj *= p;
        }
        self.prep_conj.apply_adjoint(&y)
    }

    /// `U_k |0>`
    pub fn column(&self, k: usize) -> ComplexVector {
        let mut y = self.w.clone();
        for (yj, p) in y.iter_mut().zip(self.phases(k)) {
            *yj *= p;
        }
        self.prep_conj.apply_adjoint(&y)
    }

    /// `<k, 0| U |k, 0>`
    pub fn amplitude(&self, k: usize) -> C64 {
        self.w
            .iter()
            .zip(self.phases(k))
            .map(|(w, p)| w * w * p)
            .sum()
    }

    /// Dense `L x L` block `U_k`.
    pub fn block(&self, k: usize) -> ComplexMatrix {
        let n = self.order();
        let mut m = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col = self.apply_block(k, &ComplexVector::basis(n, j));
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Dense `ML x ML` operator indexed by `k L + j`.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let (n, l) = (self.dim(), self.order());
        let cap = size_cap();
        if n > cap {
            return Err(Error::SizeCap { size: n, cap });
        }
        let mut m = ComplexMatrix::zeros(n);
        for k in 0..self.nodes {
            let b = self.block(k);
            for i in 0..l {
                for j in 0..l {
                    m[(k * l + i, k * l + j)] = b[(i, j)];
                }
            }
        }
        Ok(m)
    }
}

/// Reported gate count `2 L + log2(M) log2(L)`.
pub fn gate_count_estimate(nodes: usize, order: usize) -> Result<usize> {
    check_power_of_two("M", nodes)?;
    check_power_of_two("L", order)?;
    let (m, l) = (
        nodes.trailing_zeros() as usize,
        order.trailing_zeros() as usize,
    );
    Ok(2 * order + m * l)
}

/// Controlled phase `exp(i 2 pi 2^{s+t} / M)` applied when bit `s` of `k` and
/// bit `t` of `j` are both set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactor {
    pub k_bit: u32,
    pub j_bit: u32,
    pub angle: f64,
}

/// The `log2(M) log2(L)` two-qubit factors of `e^{i theta_k j}`.
pub fn phase_factors(nodes: usize, order: usize) -> Result<Vec<PhaseFactor>> {
    check_power_of_two("M", nodes)?;
    check_power_of_two("L", order)?;
    let mut out = Vec::new();
    for s in 0..nodes.trailing_zeros() {
        for t in 0..order.trailing_zeros() {
            let pow = ((1u128 << (s + t)) % nodes as u128) as f64;
            out.push(PhaseFactor {
                k_bit: s,
                j_bit: t,
                angle: 2.0 * PI * pow / nodes as f64,
            });
        }
    }
    Ok(out)
}

/// Diagonal of `V` rebuilt from [`phase_factors`] and the per-`k` phase
/// `e^{i theta_k}`, indexed by `k L + j`.
pub fn reassemble_phases(nodes: usize, order: usize) -> Result<Vec<C64>> {
    let factors = phase_factors(nodes, order)?;
    let mut diag = Vec::with_capacity(nodes * order);
    for k in 0..nodes {
        for j in 0..order {
            let mut z = unit_root(k, nodes);
            for f in &factors {
                if (k >> f.k_bit) & 1 == 1 && (j >> f.j_bit) & 1 == 1 {
                    z *= C64::from_polar(1.0, f.angle);
                }
            }
            diag.push(z);
        }
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn identity_fn() -> FunctionSpec {
        FunctionSpec::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)], 4.0).unwrap()
    }

    #[test]
    fn truncate_identity() {
        let t = truncate(&identity_fn(), 2, 1.5).unwrap();
        assert_eq!(t.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((t.alpha() - 1.5).abs() < 1e-15);
        assert!((t.ctilde() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn truncate_exp_alpha() {
        let t = truncate(&FunctionSpec::exp(2.0).unwrap(), 4, 1.0).unwrap();
        assert!((t.alpha() - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn truncate_geometric_alpha() {
        let t = truncate(&FunctionSpec::geometric(3.0, 2.0).unwrap(), 8, 1.2).unwrap();
        assert!((t.alpha() - 1.6655744).abs() < 1e-12, "{}", t.alpha());
    }

    #[test]
    fn truncate_errors() {
        let zero_low =
            FunctionSpec::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 2.0).unwrap();
        assert_eq!(
            truncate(&zero_low, 2, 1.5),
            Err(Error::ZeroFunction { order: 2 })
        );
        assert!(matches!(
            truncate(&identity_fn(), 3, 1.5),
            Err(Error::NotPowerOfTwo { .. })
        ));
        assert!(truncate(&identity_fn(), 2, 4.0).is_err());
    }

    #[test]
    fn weights_of_identity() {
        let t = truncate(&identity_fn(), 2, 1.5).unwrap();
        assert!((weight(&t, 0, 8) - c(1.5, 0.0)).norm() < 1e-15);
        for m in [2, 4, 8, 16] {
            for k in 0..m {
                assert!(((weight(&t, k, m) * t.ctilde()).norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn weight_of_exp_at_minus_one() {
        let t = truncate(&FunctionSpec::exp(2.0).unwrap(), 8, 1.0).unwrap();
        let mut fact = 1.0;
        let mut expect = 0.0;
        for j in 0..8 {
            if j > 0 {
                fact *= j as f64;
            }
            expect -= (-1f64).powi(j) / fact;
        }
        assert!((weight(&t, 4, 8) - c(expect, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_function_amplitude() {
        let fs = FunctionSpec::polynomial(vec![c(1.0, 0.0)], 2.0).unwrap();
        let u = build_unitary(&truncate(&fs, 4, 1.5).unwrap(), 8).unwrap();
        for k in 0..8 {
            assert!((u.amplitude(k) - unit_root(k, 8)).norm() < 1e-14);
            assert!((u.column(k)[0] - unit_root(k, 8)).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_function_amplitude() {
        let u = build_unitary(&truncate(&identity_fn(), 2, 1.5).unwrap(), 8).unwrap();
        for k in 0..8 {
            let col = u.column(k);
            assert!((col[0] - unit_root(2 * k, 8)).norm() < 1e-14);
            assert!(col[1].norm() < 1e-14);
        }
    }

    #[test]
    fn exp_amplitudes_match_weights() {
        let t = truncate(&FunctionSpec::exp(2.0).unwrap(), 4, 1.2).unwrap();
        let u = build_unitary(&t, 4).unwrap();
        for k in 0..4 {
            let z = unit_root(k, 4);
            let direct: C64 = (0..4)
                .map(|j| (z * 1.2).powi(j) / (1..=j).product::<i32>().max(1) as f64)
                .sum::<C64>()
                * z;
            assert!((weight(&t, k, 4) - direct).norm() < 1e-13);
            assert!((u.amplitude(k) - direct * t.ctilde()).norm() < 1e-13);
            assert!((u.column(k)[0] - direct * t.ctilde()).norm() < 1e-13);
        }
    }

    #[test]
    fn prep_vectors_are_unit() {
        let t = truncate(&FunctionSpec::cos(3.0).unwrap(), 16, 1.7).unwrap();
        let u = build_unitary(&t, 4).unwrap();
        assert!((u.prep_vector().norm() - 1.0).abs() < 1e-12);
        assert!((u.conj_prep_vector().norm() - 1.0).abs() < 1e-12);
        let w = u.prep().apply(&ComplexVector::basis(16, 0));
        assert!(w.distance(u.prep_vector()) < 1e-14);
    }

    #[test]
    fn householder_on_basis_vector() {
        let h = Householder::completing(&[c(0.0, 1.0), c(0.0, 0.0)]);
        let d = h.to_dense();
        assert!((d[(0, 0)] - c(0.0, 1.0)).norm() < 1e-16);
        assert!(d[(0, 1)].norm() < 1e-16);
        assert!((d[(1, 1)] - c(0.0, 1.0)).norm() < 1e-16);
    }

    #[test]
    fn unitarity_dense() {
        let t = truncate(&FunctionSpec::geometric(-2.5, 2.0).unwrap(), 8, 1.4).unwrap();
        let u = build_unitary(&t, 4).unwrap().to_dense().unwrap();
        let err = u
            .adjoint()
            .matmul(&u)
            .sub(&ComplexMatrix::identity(32))
            .max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn gate_counts() {
        assert_eq!(gate_count_estimate(2, 2).unwrap(), 5);
        assert_eq!(gate_count_estimate(16, 8).unwrap(), 28);
        assert!(gate_count_estimate(3, 2).is_err());
    }

    #[test]
    fn phase_reassembly() {
        for m in [2, 4, 8, 16] {
            for l in [2, 4, 8, 16] {
                assert_eq!(
                    phase_factors(m, l).unwrap().len(),
                    (m.trailing_zeros() * l.trailing_zeros()) as usize
                );
                let diag = reassemble_phases(m, l).unwrap();
                for k in 0..m {
                    for j in 0..l {
                        let expect = unit_root(k * (j + 1) % m, m);
                        assert!((diag[k * l + j] - expect).norm() < 1e-13);
                    }
                }
            }
        }
    }
}
