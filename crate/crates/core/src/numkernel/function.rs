use std::f64::consts::PI;

use super::series::certified_terms;
use crate::{Error, Result, C64};

/// Number of boundary samples used to estimate `max |f|` for custom coefficients.
pub const CUSTOM_DISK_SAMPLES: usize = 4096;
/// Multiplier applied to the sampled boundary maximum.
pub const CUSTOM_DISK_SAFETY: f64 = 1.01;

/// Which analytic function a [`FunctionSpec`] describes.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Exp,
    Cos,
    Sin,
    /// `1 / (1 - z/s)`, coefficients `s^{-j}`.
    Geometric {
        pole: f64,
    },
    Polynomial(Vec<C64>),
    Custom(Vec<C64>),
}

/// An analytic function on the closed disk `|z| <= R`: its Taylor coefficients,
/// the radius `R > 1` and a bound `B >= max_{|z|<=R} |f(z)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    radius: f64,
    disk_max: f64,
}

impl FunctionSpec {
    pub fn exp(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self {
            kind: FunctionKind::Exp,
            radius,
            disk_max: radius.exp(),
        })
    }

    pub fn cos(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self {
            kind: FunctionKind::Cos,
            radius,
            disk_max: radius.cosh(),
        })
    }

    pub fn sin(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self {
            kind: FunctionKind::Sin,
            radius,
            disk_max: radius.cosh(),
        })
    }

    /// `1/(1 - z/s)`; requires `R < |s|`.
    pub fn geometric(pole: f64, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        if !(pole.is_finite() && radius < pole.abs()) {
            return Err(Error::InvalidParameter(format!(
                "geometric pole |s| = {} must exceed the radius {radius}",
                pole.abs()
            )));
        }
        let disk_max = 1.0 / (1.0 - radius / pole.abs());
        Ok(Self {
            kind: FunctionKind::Geometric { pole },
            radius,
            disk_max,
        })
    }

    /// Polynomial with the given coefficients; `B = sum |a_j| R^j`.
    pub fn polynomial(coeffs: Vec<C64>, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        check_coeffs(&coeffs)?;
        let disk_max = coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm() * radius.powi(j as i32))
            .sum();
        Ok(Self {
            kind: FunctionKind::Polynomial(coeffs),
            radius,
            disk_max,
        })
    }

    /// Arbitrary finite coefficient list; `B` is estimated by sampling the
    /// circle `|z| = R` and applying [`CUSTOM_DISK_SAFETY`].
    pub fn custom(coeffs: Vec<C64>, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        check_coeffs(&coeffs)?;
        let sampled = (0..CUSTOM_DISK_SAMPLES)
            .map(|s| {
                let z = C64::from_polar(radius, 2.0 * PI * s as f64 / CUSTOM_DISK_SAMPLES as f64);
                horner(&coeffs, z).norm()
            })
            .fold(0.0, f64::max);
        Ok(Self {
            kind: FunctionKind::Custom(coeffs),
            radius,
            disk_max: sampled * CUSTOM_DISK_SAFETY,
        })
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FunctionKind::Exp => "exp",
            FunctionKind::Cos => "cos",
            FunctionKind::Sin => "sin",
            FunctionKind::Geometric { .. } => "geometric",
            FunctionKind::Polynomial(_) => "poly",
            FunctionKind::Custom(_) => "custom",
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `B`, the bound on `|f|` over the disk.
    pub fn disk_max(&self) -> f64 {
        self.disk_max
    }

    /// Number of nonzero-capable coefficients, `None` for infinite series.
    pub fn series_len(&self) -> Option<usize> {
        match &self.kind {
            FunctionKind::Polynomial(c) | FunctionKind::Custom(c) => Some(c.len()),
            _ => None,
        }
    }

    /// Taylor coefficient `a_j`.
    pub fn coeff(&self, j: usize) -> C64 {
        let real = |v: f64| C64::new(v, 0.0);
        match &self.kind {
            FunctionKind::Exp => real(inv_factorial(j)),
            FunctionKind::Cos => {
                if j % 2 == 1 {
                    real(0.0)
                } else {
                    real(if (j / 2).is_multiple_of(2) { 1.0 } else { -1.0 } * inv_factorial(j))
                }
            }
            FunctionKind::Sin => {
                if j.is_multiple_of(2) {
                    real(0.0)
                } else {
                    real(if (j / 2).is_multiple_of(2) { 1.0 } else { -1.0 } * inv_factorial(j))
                }
            }
            FunctionKind::Geometric { pole } => {
                let inv = 1.0 / pole;
                real((0..j).fold(1.0, |p, _| p * inv))
            }
            FunctionKind::Polynomial(c) | FunctionKind::Custom(c) => {
                c.get(j).copied().unwrap_or(real(0.0))
            }
        }
    }

    /// Coefficients `a_0 .. a_{n-1}`.
    pub fn coeffs(&self, n: usize) -> Vec<C64> {
        match &self.kind {
            FunctionKind::Exp | FunctionKind::Cos | FunctionKind::Sin => {
                let mut out = Vec::with_capacity(n);
                let mut fact_inv = 1.0;
                for j in 0..n {
                    if j > 0 {
                        fact_inv /= j as f64;
                    }
                    let v = match self.kind {
                        FunctionKind::Exp => fact_inv,
                        FunctionKind::Cos if j % 2 == 0 => {
                            if (j / 2) % 2 == 0 {
                                fact_inv
                            } else {
                                -fact_inv
                            }
                        }
                        FunctionKind::Sin if j % 2 == 1 => {
                            if (j / 2) % 2 == 0 {
                                fact_inv
                            } else {
                                -fact_inv
                            }
                        }
                        _ => 0.0,
                    };
                    out.push(C64::new(v, 0.0));
                }
                out
            }
            FunctionKind::Geometric { pole } => {
                let inv = 1.0 / pole;
                let mut p = 1.0;
                (0..n)
                    .map(|_| {
                        let v = C64::new(p, 0.0);
                        p *= inv;
                        v
                    })
                    .collect()
            }
            _ => (0..n).map(|j| self.coeff(j)).collect(),
        }
    }

    /// `f(z)` from the power series, truncated where the Cauchy-estimate tail
    /// `B (|z|/R)^J / (1 - |z|/R)` drops to `tol`.
    pub fn eval(&self, z: C64, tol: f64) -> Result<C64> {
        let terms = match self.series_len() {
            Some(len) => len,
            None => {
                let q = z.norm() / self.radius;
                if q >= 1.0 {
                    return Err(Error::DivergentSeries {
                        norm: z.norm(),
                        radius: self.radius,
                    });
                }
                certified_terms(self.disk_max, q, 1.0, tol)
            }
        };
        Ok(horner(&self.coeffs(terms), z))
    }

    /// Closed form for the catalog functions, used as a cross-check.
    pub fn closed_form(&self, z: C64) -> Option<C64> {
        match &self.kind {
            FunctionKind::Exp => Some(z.exp()),
            FunctionKind::Cos => Some(z.cos()),
            FunctionKind::Sin => Some(z.sin()),
            FunctionKind::Geometric { pole } => Some(1.0 / (1.0 - z / pole)),
            FunctionKind::Polynomial(c) => Some(horner(c, z)),
            FunctionKind::Custom(_) => None,
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "disk radius R = {radius} must be finite and > 1"
        )))
    }
}

fn check_coeffs(coeffs: &[C64]) -> Result<()> {
    if coeffs.is_empty() || coeffs.iter().all(|a| *a == C64::new(0.0, 0.0)) {
        return Err(Error::InvalidParameter(
            "coefficient list is empty or identically zero".into(),
        ));
    }
    if !coeffs.iter().all(|a| a.is_finite()) {
        return Err(Error::InvalidParameter(
            "coefficient list has non-finite entries".into(),
        ));
    }
    Ok(())
}

fn inv_factorial(j: usize) -> f64 {
    (1..=j).fold(1.0, |acc, k| acc / k as f64)
}

pub(crate) fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_bounds() {
        assert!((FunctionSpec::exp(2.0).unwrap().disk_max() - 2f64.exp()).abs() < 1e-15);
        assert!((FunctionSpec::cos(2.0).unwrap().disk_max() - 2f64.cosh()).abs() < 1e-15);
        assert!((FunctionSpec::sin(1.5).unwrap().disk_max() - 1.5f64.cosh()).abs() < 1e-15);
        let g = FunctionSpec::geometric(3.0, 2.0).unwrap();
        assert!((g.disk_max() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        assert!(FunctionSpec::exp(1.0).is_err());
        assert!(FunctionSpec::exp(f64::NAN).is_err());
        assert!(FunctionSpec::geometric(2.0, 2.0).is_err());
        assert!(FunctionSpec::geometric(-1.5, 2.0).is_err());
        assert!(FunctionSpec::polynomial(vec![], 2.0).is_err());
        assert!(FunctionSpec::custom(vec![C64::new(0.0, 0.0)], 2.0).is_err());
    }

    #[test]
    fn coefficients_match_single_lookup() {
        for fs in [
            FunctionSpec::exp(2.0).unwrap(),
            FunctionSpec::cos(2.0).unwrap(),
            FunctionSpec::sin(2.0).unwrap(),
            FunctionSpec::geometric(-3.0, 2.0).unwrap(),
        ] {
            let all = fs.coeffs(30);
            for (j, a) in all.iter().enumerate() {
                assert!(
                    (a - fs.coeff(j)).norm() <= 1e-15 * a.norm().max(1e-300),
                    "{} a_{j}",
                    fs.name()
                );
            }
        }
    }

    #[test]
    fn series_matches_closed_form() {
        for fs in [
            FunctionSpec::exp(2.0).unwrap(),
            FunctionSpec::cos(2.0).unwrap(),
            FunctionSpec::sin(2.0).unwrap(),
            FunctionSpec::geometric(3.0, 2.0).unwrap(),
        ] {
            for k in 0..16 {
                let z = C64::from_polar(1.5, 2.0 * PI * k as f64 / 16.0);
                let series = fs.eval(z, 1e-14).unwrap();
                let exact = fs.closed_form(z).unwrap();
                assert!((series - exact).norm() < 1e-13, "{} at {z}", fs.name());
            }
        }
    }

    #[test]
    fn eval_rejects_outside_disk() {
        let fs = FunctionSpec::exp(2.0).unwrap();
        assert!(matches!(
            fs.eval(C64::new(2.5, 0.0), 1e-12),
            Err(Error::DivergentSeries { .. })
        ));
    }

    #[test]
    fn custom_bound_dominates_boundary() {
        let coeffs = vec![C64::new(1.0, 0.0), C64::new(0.0, -0.5), C64::new(0.25, 0.0)];
        let fs = FunctionSpec::custom(coeffs.clone(), 2.0).unwrap();
        // exact max of |1 - 0.5i z + 0.25 z^2| on |z| = 2 is at most 1 + 1 + 1
        assert!(fs.disk_max() <= 3.0 * CUSTOM_DISK_SAFETY);
        for (j, c) in coeffs.iter().enumerate() {
            assert!(c.norm() <= fs.disk_max() / 2f64.powi(j as i32));
        }
    }

    #[test]
    fn polynomial_bound_is_coefficient_sum() {
        let fs =
            FunctionSpec::polynomial(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 2.0).unwrap();
        assert_eq!(fs.disk_max(), 2.0);
        assert_eq!(fs.coeff(5), C64::new(0.0, 0.0));
    }
}
