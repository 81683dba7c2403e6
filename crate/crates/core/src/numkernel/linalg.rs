use std::ops::{Deref, DerefMut, Index, IndexMut};

use crate::{Error, Result, C64};

/// Relative pivot threshold below which a matrix is treated as singular.
const PIVOT_TOL: f64 = 1e-13;

/// Relative tolerance of [`spectral_norm`].
pub const SPECTRAL_NORM_TOL: f64 = 1e-10;

/// Iteration cap of [`spectral_norm`].
pub const POWER_ITERATION_CAP: usize = 10_000;

/// Complex column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Standard basis vector `e_i` of length `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &Self) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    /// Hermitian inner product `<self, other>`, conjugate-linear in `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

impl From<Vec<C64>> for ComplexVector {
    fn from(v: Vec<C64>) -> Self {
        Self(v)
    }
}

impl FromIterator<C64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Deref for ComplexVector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl DerefMut for ComplexVector {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }
}

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; fails unless the length is a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            assert_eq!(rows[i].len(), dim, "matrix must be square");
            C64::new(rows[i][j], 0.0)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim)
            .all(|i| (0..self.dim).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `shift * I - self`
    pub fn shifted_negative(&self, shift: C64) -> Self {
        let mut m = self.scale_real(-1.0);
        for i in 0..self.dim {
            m[(i, i)] += shift;
        }
        m
    }

    pub fn mul_vec(&self, v: &[C64]) -> ComplexVector {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^H v`
    pub fn adjoint_mul_vec(&self, v: &[C64]) -> ComplexVector {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        out.into()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// LU factors with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let threshold = PIVOT_TOL * a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot > threshold) {
                return Err(Error::SingularMatrix {
                    pivot: pivot.max(0.0),
                    threshold,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let inv = lu[(k, k)].inv();
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv;
                lu[(i, k)] = factor;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu.data[k * n + j];
                    lu.data[i * n + j] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    pub fn solve(&self, b: &[C64]) -> Result<ComplexVector> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = (0..i).fold(x[i], |s, j| s - self.lu[(i, j)] * x[j]);
            x[i] = s;
        }
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(x[i], |s, j| s - self.lu[(i, j)] * x[j]);
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x.into())
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[C64]) -> Result<ComplexVector> {
    if a.dim() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.len(),
        });
    }
    LuFactors::new(a)?.solve(b)
}

/// Dense inverse, column by column from one factorization.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let lu = LuFactors::new(a)?;
    let mut inv = ComplexMatrix::zeros(n);
    for j in 0..n {
        let col = lu.solve(&ComplexVector::basis(n, j))?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Power iterations spent on one operator before it is squared.
const ITERATIONS_PER_STAGE: usize = 32;

/// Largest singular value by power iteration on `A^H A`.
///
/// The start vector is the normalized all-ones vector with `1e-3` added to its
/// first entry. Iteration stops once the eigen-residual of `A^H A` falls below
/// the relative tolerance. When a stage of iterations does not converge (a
/// tight cluster of top singular values), the iteration continues on the
/// square of the current operator, which has the same dominant eigenvector
/// and a squared gap ratio. The residual is always measured against `A^H A`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let n = a.dim();
    if n == 0 || a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut v = vec![C64::new(1.0, 0.0); n];
    v[0] += 1e-3;
    let mut v = ComplexVector::from(v);
    let nv = v.norm();
    v = v.scale_real(1.0 / nv);

    if a.mul_vec(&v).norm() == 0.0 {
        // Start vector in the null space; restart on the heaviest column.
        let j = (0..n)
            .max_by(|&p, &q| a.column(p).norm().total_cmp(&a.column(q).norm()))
            .unwrap_or(0);
        v = ComplexVector::basis(n, j);
    }

    // Power of A^H A in use once the plain iteration stalls.
    let mut power: Option<ComplexMatrix> = None;
    for iter in 0..POWER_ITERATION_CAP {
        let av = a.mul_vec(&v);
        let sigma_sq = av.norm_sqr();
        let w = a.adjoint_mul_vec(&av);
        if w.norm() == 0.0 {
            return Ok(sigma_sq.sqrt());
        }
        let residual = w.sub(&v.scale_real(sigma_sq)).norm();
        if residual <= SPECTRAL_NORM_TOL * sigma_sq {
            let next = w.scale_real(1.0 / w.norm());
            return Ok(sigma_sq.sqrt().max(a.mul_vec(&next).norm()));
        }
        if iter > 0 && iter % ITERATIONS_PER_STAGE == 0 {
            let base = power.take().unwrap_or_else(|| a.adjoint().matmul(a));
            let sq = base.matmul(&base);
            let scale = sq.max_abs();
            power = Some(if scale > 0.0 {
                sq.scale_real(1.0 / scale)
            } else {
                base
            });
        }
        let next = match &power {
            Some(p) => p.mul_vec(&v),
            None => w,
        };
        let nn = next.norm();
        if nn == 0.0 || !nn.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iter + 1,
            });
        }
        v = next.scale_real(1.0 / nn);
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITERATION_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_system() {
        let x = lu_solve(
            &ComplexMatrix::identity(2),
            &ComplexVector::from_real(&[1.0, 2.0]),
        )
        .unwrap();
        assert_eq!(&x[..], &[c(1.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn diagonal_scaling() {
        let a = ComplexMatrix::identity(2).scale_real(2.0);
        let x = lu_solve(&a, &ComplexVector::from_real(&[1.0, 0.0])).unwrap();
        assert_eq!(&x[..], &[c(0.5, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let err = lu_solve(&a, &ComplexVector::from_real(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
        assert!(matches!(
            lu_solve(&ComplexMatrix::zeros(3), &ComplexVector::zeros(3)),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = lu_solve(&a, &ComplexVector::from_real(&[3.0, 4.0])).unwrap();
        assert_eq!(&x[..], &[c(4.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            lu_solve(&ComplexMatrix::identity(3), &ComplexVector::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = ComplexMatrix::from_fn(4, |i, j| {
            c(
                (i + 2 * j) as f64 * 0.1 + if i == j { 2.0 } else { 0.0 },
                (i as f64 - j as f64) * 0.3,
            )
        });
        let prod = a.matmul(&inverse(&a).unwrap());
        assert!(prod.sub(&ComplexMatrix::identity(4)).max_abs() < 1e-13);
    }

    #[test]
    fn spectral_norm_simple_cases() {
        assert_eq!(spectral_norm(&ComplexMatrix::identity(4)).unwrap(), 1.0);
        let d = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(-0.25, 0.0)]);
        assert!((spectral_norm(&d).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
        // seed vector orthogonal to the row space
        let a = ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[0.0, 0.0]]);
        assert!((spectral_norm(&a).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_of_nilpotent_block() {
        let a =
            ComplexMatrix::from_real_rows(&[&[0.0, 3.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!((spectral_norm(&a).unwrap() - 3.0).abs() < 1e-12);
    }
}
