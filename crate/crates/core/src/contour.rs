//! Trapezoidal rule on the circle `|z| = beta` applied to Cauchy's integral
//! formula: `f_M(A) b = (1/M) sum_k g_k x_k` with
//! `x_k = (e^{i theta_k} I - A/beta)^{-1} b` and `g_k = f(beta e^{i theta_k}) e^{i theta_k}`.

use std::f64::consts::PI;

use crate::numkernel::{inverse, lu_solve, ComplexMatrix, ComplexVector, FunctionSpec};
use crate::{check_power_of_two, Error, Result, C64};

/// Tolerance for evaluating `f` at the quadrature nodes.
pub const NODE_EVAL_TOL: f64 = 1e-14;

/// Quadrature and truncation parameters with their derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPlan {
    beta: f64,
    radius: f64,
    nodes: usize,
    truncation: usize,
    hhl_error: f64,
}

impl ContourPlan {
    /// Requires `1 < beta < radius`, `nodes` and `truncation` powers of two and
    /// `hhl_error >= 0`.
    pub fn new(
        beta: f64,
        radius: f64,
        nodes: usize,
        truncation: usize,
        hhl_error: f64,
    ) -> Result<Self> {
        if !(beta > 1.0 && beta < radius) {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must satisfy 1 < beta < R = {radius}"
            )));
        }
        check_power_of_two("M", nodes)?;
        check_power_of_two("L", truncation)?;
        if !(hhl_error >= 0.0 && hhl_error.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eps' = {hhl_error} must be >= 0"
            )));
        }
        Ok(Self {
            beta,
            radius,
            nodes,
            truncation,
            hhl_error,
        })
    }

    /// Plan for a function with only `beta` and `M` set (`L = 1`, `eps' = 0`).
    pub fn quadrature(fs: &FunctionSpec, beta: f64, nodes: usize) -> Result<Self> {
        Self::new(beta, fs.radius(), nodes, 1, 0.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn truncation(&self) -> usize {
        self.truncation
    }
    pub fn hhl_error(&self) -> f64 {
        self.hhl_error
    }

    /// `r = beta / R`
    pub fn r(&self) -> f64 {
        self.beta / self.radius
    }

    /// `kappa' = 1 / (1 - 1/beta)`
    pub fn kappa_prime(&self) -> f64 {
        1.0 / (1.0 - 1.0 / self.beta)
    }

    /// `gamma = max(kappa', 1/(1 - r))`
    pub fn gamma(&self) -> f64 {
        self.kappa_prime().max(1.0 / (1.0 - self.r()))
    }
}

/// Equispaced nodes on the circle of radius `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureNodes {
    pub angles: Vec<f64>,
    pub points: Vec<C64>,
}

impl QuadratureNodes {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `e^{i theta_k}`
    pub fn unit(&self, k: usize) -> C64 {
        C64::from_polar(1.0, self.angles[k])
    }
}

/// `theta_k = 2 pi k / M` and `beta e^{i theta_k}` for `k = 0..M`.
pub fn make_nodes(nodes: usize, beta: f64) -> Result<QuadratureNodes> {
    check_power_of_two("M", nodes)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must be positive"
        )));
    }
    let angles: Vec<f64> = (0..nodes).map(|k| node_angle(k, nodes)).collect();
    let points = angles.iter().map(|&t| C64::from_polar(beta, t)).collect();
    Ok(QuadratureNodes { angles, points })
}

/// `e^{i theta_k}` with exact values on the axes.
pub(crate) fn unit_root(k: usize, nodes: usize) -> C64 {
    let k = k % nodes;
    if (4 * k).is_multiple_of(nodes) {
        match 4 * k / nodes {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    } else {
        C64::from_polar(1.0, node_angle(k, nodes))
    }
}

fn node_angle(k: usize, nodes: usize) -> f64 {
    2.0 * PI * k as f64 / nodes as f64
}

/// `S_M(y) = (1/M) sum_k e^{2 pi i y k / M}`, evaluated by direct summation
/// and rounded to the exact value in `{0, 1}`.
pub fn periodized_indicator(nodes: usize, y: i64) -> f64 {
    debug_assert!(nodes.is_power_of_two());
    let m = nodes as f64;
    let sum: C64 = (0..nodes)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * (y as f64) * (k as f64) / m))
        .sum::<C64>()
        / m;
    let rounded = sum.re.round();
    debug_assert!(
        (sum - C64::new(rounded, 0.0)).norm() < 1e-10,
        "S_M({y}) = {sum} not within 1e-10 of an integer"
    );
    rounded
}

/// Quadrature weights `g_k = f(beta e^{i theta_k}) e^{i theta_k}`.
pub fn node_weights(fs: &FunctionSpec, plan: &ContourPlan) -> Result<Vec<C64>> {
    let m = plan.nodes();
    (0..m)
        .map(|k| {
            let u = unit_root(k, m);
            Ok(fs.eval(u * plan.beta(), NODE_EVAL_TOL)? * u)
        })
        .collect()
}

/// Shifted block `e^{i theta_k} I - A / beta`.
pub fn shifted_block(a: &ComplexMatrix, beta: f64, k: usize, nodes: usize) -> ComplexMatrix {
    a.scale_real(1.0 / beta)
        .shifted_negative(unit_root(k, nodes))
}

/// `f_M(A) b`, accumulated over `k` in increasing order.
pub fn contour_apply(
    fs: &FunctionSpec,
    a: &ComplexMatrix,
    b: &[C64],
    plan: &ContourPlan,
) -> Result<ComplexVector> {
    if a.dim() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.len(),
        });
    }
    let m = plan.nodes();
    let weights = node_weights(fs, plan)?;
    let mut acc = ComplexVector::zeros(b.len());
    for (k, g) in weights.iter().enumerate() {
        let xk = lu_solve(&shifted_block(a, plan.beta(), k, m), b)?;
        acc.axpy(*g, &xk);
    }
    Ok(acc.scale_real(1.0 / m as f64))
}

/// Dense `f_M(A)`.
pub fn contour_matrix(
    fs: &FunctionSpec,
    a: &ComplexMatrix,
    plan: &ContourPlan,
) -> Result<ComplexMatrix> {
    let m = plan.nodes();
    let weights = node_weights(fs, plan)?;
    let mut acc = ComplexMatrix::zeros(a.dim());
    for (k, g) in weights.iter().enumerate() {
        let inv = inverse(&shifted_block(a, plan.beta(), k, m))?;
        acc = acc.add(&inv.scale(*g));
    }
    Ok(acc.scale_real(1.0 / m as f64))
}

/// Upper bound on `||f(A) - f_M(A)||` for `||A|| = norm_a`:
/// `B/(1 - ||A||/R) [ q^M/(1 - q^M) + r^M/(1 - r^M) ]` with `q = ||A||/beta`, `r = beta/R`.
pub fn truncation_bound(fs: &FunctionSpec, norm_a: f64, plan: &ContourPlan) -> Result<f64> {
    let m = plan.nodes() as i32;
    let q = norm_a / plan.beta();
    let r = plan.r();
    let (qm, rm) = (q.powi(m), r.powi(m));
    for ratio in [qm, rm, norm_a / fs.radius()] {
        if !(ratio < 1.0) {
            return Err(Error::DegenerateBound { ratio });
        }
    }
    Ok(fs.disk_max() / (1.0 - norm_a / fs.radius()) * (qm / (1.0 - qm) + rm / (1.0 - rm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::taylor_apply;

    #[test]
    fn four_nodes_on_unit_circle() {
        let n = make_nodes(4, 1.0).unwrap();
        let expected = [0.0, PI / 2.0, PI, 1.5 * PI];
        for (a, e) in n.angles.iter().zip(expected) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn antipodal_pair() {
        let n = make_nodes(2, 1.7).unwrap();
        assert!((n.points[0] - C64::new(1.7, 0.0)).norm() < 1e-15);
        assert!((n.points[1] - C64::new(-1.7, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quarter_turn_point() {
        let n = make_nodes(8, 1.5).unwrap();
        assert!((n.points[2] - C64::new(0.0, 1.5)).norm() < 1e-15);
    }

    #[test]
    fn nodes_reject_non_power_of_two() {
        assert_eq!(
            make_nodes(6, 1.5),
            Err(Error::NotPowerOfTwo {
                name: "M",
                value: 6
            })
        );
        assert!(make_nodes(0, 1.5).is_err());
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(periodized_indicator(4, 0), 1.0);
        assert_eq!(periodized_indicator(4, 2), 0.0);
        assert_eq!(periodized_indicator(4, 8), 1.0);
        assert_eq!(periodized_indicator(4, -4), 1.0);
    }

    #[test]
    fn plan_validation() {
        assert!(ContourPlan::new(1.0, 2.0, 4, 4, 0.0).is_err());
        assert!(ContourPlan::new(2.0, 2.0, 4, 4, 0.0).is_err());
        assert!(ContourPlan::new(1.5, 2.0, 3, 4, 0.0).is_err());
        assert!(ContourPlan::new(1.5, 2.0, 4, 6, 0.0).is_err());
        assert!(ContourPlan::new(1.5, 2.0, 4, 4, -1.0).is_err());
        let p = ContourPlan::new(2.0, 4.0, 4, 4, 0.0).unwrap();
        assert_eq!(p.r(), 0.5);
        assert_eq!(p.kappa_prime(), 2.0);
        assert_eq!(p.gamma(), 2.0);
    }

    #[test]
    fn exp_of_zero_matrix_collapses_to_aliased_scalar() {
        // A = 0 leaves a_0 + sum_{y>=1} a_{yM} beta^{yM}
        let fs = FunctionSpec::exp(2.0).unwrap();
        let plan = ContourPlan::quadrature(&fs, 1.2, 4).unwrap();
        let out = contour_apply(
            &fs,
            &ComplexMatrix::zeros(2),
            &ComplexVector::from_real(&[1.0, 0.0]),
            &plan,
        )
        .unwrap();
        let mut expected = 0.0;
        let mut fact = 1.0;
        for j in 0..60 {
            if j > 0 {
                fact *= j as f64;
            }
            if j % 4 == 0 {
                expected += 1.2f64.powi(j) / fact;
            }
        }
        assert!((out[0] - C64::new(expected, 0.0)).norm() < 1e-14);
        assert!(out[1].norm() < 1e-15);

        let mat = contour_matrix(&fs, &ComplexMatrix::zeros(2), &plan).unwrap();
        let diag = ComplexMatrix::identity(2).scale_real(expected);
        assert!(mat.sub(&diag).max_abs() < 1e-14);
    }

    #[test]
    fn constant_function_returns_b() {
        let fs = FunctionSpec::polynomial(vec![C64::new(1.0, 0.0)], 4.0).unwrap();
        let plan = ContourPlan::quadrature(&fs, 2.0, 64).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[0.2, 0.5], &[-0.3, 0.1]]);
        let b = ComplexVector::from_real(&[0.6, 0.8]);
        let out = contour_apply(&fs, &a, &b, &plan).unwrap();
        // bound is ~ 2^-64 relative, so only round-off remains
        assert!(out.distance(&b) < 1e-14);
        let mat = contour_matrix(&fs, &a, &ContourPlan::quadrature(&fs, 2.0, 16).unwrap()).unwrap();
        assert!(mat.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-4);
    }

    #[test]
    fn exp_involution_within_bound() {
        let fs = FunctionSpec::exp(2.0).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]);
        let b = ComplexVector::from_real(&[1.0, 0.0]);
        let plan = ContourPlan::quadrature(&fs, 1.3, 32).unwrap();
        let out = contour_apply(&fs, &a, &b, &plan).unwrap();
        let reference = taylor_apply(&fs, &a, &b, 1e-14).unwrap();
        let bound = truncation_bound(&fs, 0.5, &plan).unwrap();
        assert!(out.distance(&reference) <= bound);
    }

    #[test]
    fn identity_function_matrix_within_bound() {
        let fs =
            FunctionSpec::polynomial(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 2.0).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[0.3, 0.4], &[0.0, -0.5]]);
        let plan = ContourPlan::quadrature(&fs, 1.5, 8).unwrap();
        let mat = contour_matrix(&fs, &a, &plan).unwrap();
        let norm = crate::numkernel::spectral_norm(&a).unwrap();
        let bound = truncation_bound(&fs, norm, &plan).unwrap();
        assert!(crate::numkernel::spectral_norm(&mat.sub(&a)).unwrap() <= bound);
    }

    #[test]
    fn bound_formula() {
        let fs = FunctionSpec::exp(2.0).unwrap();
        let plan = ContourPlan::quadrature(&fs, 1.2, 8).unwrap();
        // B = e^2, ||A|| = 1: e^2/(1/2) * [ (1/1.2)^8/(1-(1/1.2)^8) + 0.6^8/(1-0.6^8) ]
        // scripted evaluation: 4.73092004842571
        let got = truncation_bound(&fs, 1.0, &plan).unwrap();
        assert!((got - 4.73092004842571).abs() < 1e-12, "{got}");

        let zero = truncation_bound(&fs, 0.0, &plan).unwrap();
        let r8 = 0.6f64.powi(8);
        assert!((zero - 2f64.exp() * r8 / (1.0 - r8)).abs() < 1e-15);

        assert!(matches!(
            truncation_bound(&fs, 1.3, &plan),
            Err(Error::DegenerateBound { .. })
        ));
    }

    #[test]
    fn bound_decays_geometrically_in_m() {
        let fs = FunctionSpec::cos(2.0).unwrap();
        for beta in [1.2, 1.5] {
            for m in [4usize, 8, 16] {
                let p1 = ContourPlan::quadrature(&fs, beta, m).unwrap();
                let p2 = ContourPlan::quadrature(&fs, beta, 2 * m).unwrap();
                let rho = (1.0 / beta).max(beta / 2.0).powi(m as i32);
                let (b1, b2) = (
                    truncation_bound(&fs, 1.0, &p1).unwrap(),
                    truncation_bound(&fs, 1.0, &p2).unwrap(),
                );
                assert!(b2 <= b1 * rho * (1.0 + 1e-12));
            }
        }
    }
}
