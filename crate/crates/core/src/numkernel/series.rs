use super::linalg::{spectral_norm, ComplexMatrix, ComplexVector};
use super::FunctionSpec;
use crate::{Error, Result, C64};

/// Norms below this are treated as zero when normalizing.
const ZERO_NORM: f64 = 1e-300;
const MAX_TERMS: usize = 1_000_000;

/// Unit-norm amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStateView {
    amplitudes: ComplexVector,
}

impl QuantumStateView {
    /// Tolerance on `| ||amplitudes|| - 1 |`.
    pub const NORM_TOL: f64 = 1e-12;

    pub fn normalize(v: &ComplexVector) -> Result<Self> {
        let n = v.norm();
        if !(n > ZERO_NORM) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amplitudes: v.scale_real(1.0 / n),
        })
    }

    /// Wraps an already normalized vector, checking the norm.
    pub fn from_unit(v: ComplexVector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm {n} is not 1")));
        }
        Ok(Self { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes.distance(&other.amplitudes)
    }
}

/// Smallest `J >= 1` with `B q^J / (1 - q) * scale <= tol`.
pub fn certified_terms(disk_max: f64, q: f64, scale: f64, tol: f64) -> usize {
    debug_assert!((0.0..1.0).contains(&q) && tol > 0.0);
    if q == 0.0 {
        return 1;
    }
    let lead = disk_max * scale / (1.0 - q);
    if lead <= tol {
        return 1;
    }
    let j = ((tol / lead).ln() / q.ln()).ceil();
    (j.max(1.0) as usize).min(MAX_TERMS)
}

/// `f(A) b` by partial sums of `sum_j a_j A^j b`.
///
/// The number of terms is fixed up front from the tail bound
/// `B (||A||/R)^J / (1 - ||A||/R) ||b|| <= tol`.
pub fn taylor_apply(
    fs: &FunctionSpec,
    a: &ComplexMatrix,
    b: &[C64],
    tol: f64,
) -> Result<ComplexVector> {
    if a.dim() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    // small inflation covers the power-iteration stopping error
    let norm_a = spectral_norm(a)? * (1.0 + 1e-9);
    let terms = series_terms(fs, norm_a, ComplexVector::from(b.to_vec()).norm(), tol)?;
    let coeffs = fs.coeffs(terms);

    let mut power = ComplexVector::from(b.to_vec());
    let mut acc = ComplexVector::zeros(b.len());
    for (j, aj) in coeffs.iter().enumerate() {
        if j > 0 {
            power = a.mul_vec(&power);
        }
        if *aj != C64::new(0.0, 0.0) {
            acc.axpy(*aj, &power);
        }
    }
    Ok(acc)
}

/// Dense `f(A)` built column by column with [`taylor_apply`].
pub fn taylor_matrix(fs: &FunctionSpec, a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for j in 0..n {
        let col = taylor_apply(fs, a, &ComplexVector::basis(n, j), tol)?;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

fn series_terms(fs: &FunctionSpec, norm_a: f64, norm_b: f64, tol: f64) -> Result<usize> {
    if let Some(len) = fs.series_len() {
        return Ok(len);
    }
    let q = norm_a / fs.radius();
    if q >= 1.0 {
        return Err(Error::DivergentSeries {
            norm: norm_a,
            radius: fs.radius(),
        });
    }
    if norm_b == 0.0 {
        return Ok(1);
    }
    Ok(certified_terms(fs.disk_max(), q, norm_b, tol))
}

/// `|| u/||u|| - v/||v|| ||`.
pub fn normalized_distance(u: &[C64], v: &[C64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(nu > ZERO_NORM && nv > ZERO_NORM) {
        return Err(Error::ZeroVector);
    }
    let d = u
        .iter()
        .zip(v)
        .map(|(a, b)| (a / nu - b / nv).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(d.min(2.0))
}
