use crate::numkernel::{taylor_apply, ComplexMatrix, FunctionSpec};
use crate::{Error, Result, C64};

/// Tolerance of the power-series reference `f(A)b`.
pub const REFERENCE_TOL: f64 = 1e-13;

/// Largest `M` or `L` that parameter selection will return.
pub const MAX_POW2_TARGET: usize = 1 << 16;

/// Below this `||f(A)b||` the target state is undefined.
pub const NULL_IMAGE_TOL: f64 = 1e-12;

/// `F = ||f(A) b|| (1 - 1/beta) / B` for a unit `b`.
pub fn compute_f_scale(fs: &FunctionSpec, a: &ComplexMatrix, b: &[C64], beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must exceed 1"
        )));
    }
    let fb = taylor_apply(fs, a, b, REFERENCE_TOL)?;
    let norm = fb.norm();
    if norm < NULL_IMAGE_TOL {
        return Err(Error::NullImage { norm });
    }
    Ok(norm * (1.0 - 1.0 / beta) / fs.disk_max())
}

/// Parameters of one run: quadrature, truncation and solver error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPlan {
    /// Target accuracy, absent for explicitly given parameters.
    pub epsilon: Option<f64>,
    pub f_scale: f64,
    pub eps_prime: f64,
    pub nodes: usize,
    pub order: usize,
    pub beta: f64,
    pub r: f64,
    pub gamma: f64,
    pub aa_repetitions: u64,
}

impl ParameterPlan {
    /// Plan with `M`, `L` and `eps'` set directly.
    pub fn explicit(
        fs: &FunctionSpec,
        beta: f64,
        f_scale: f64,
        nodes: usize,
        order: usize,
        eps_prime: f64,
    ) -> Result<Self> {
        let r = check_beta(fs, beta)?;
        check_f(f_scale)?;
        crate::check_power_of_two("M", nodes)?;
        crate::check_power_of_two("L", order)?;
        if !(0.0..=2.0).contains(&eps_prime) {
            return Err(Error::InvalidParameter(format!(
                "eps' = {eps_prime} must lie in [0, 2]"
            )));
        }
        Ok(Self {
            epsilon: None,
            f_scale,
            eps_prime,
            nodes,
            order,
            beta,
            r,
            gamma: gamma(beta, r),
            aa_repetitions: aa_repetitions(f_scale, r),
        })
    }
}

fn check_beta(fs: &FunctionSpec, beta: f64) -> Result<f64> {
    if !(beta > 1.0 && beta < fs.radius()) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must satisfy 1 < beta < R = {}",
            fs.radius()
        )));
    }
    Ok(beta / fs.radius())
}

fn check_f(f_scale: f64) -> Result<()> {
    if !(f_scale > 0.0 && f_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "F = {f_scale} must be positive"
        )));
    }
    Ok(())
}

/// `max(1/(1 - 1/beta), 1/(1 - r))`
pub fn gamma(beta: f64, r: f64) -> f64 {
    (1.0 / (1.0 - 1.0 / beta)).max(1.0 / (1.0 - r))
}

/// `ceil((4/3) / (F (1 - r)))`
pub fn aa_repetitions(f_scale: f64, r: f64) -> u64 {
    ((4.0 / 3.0) / (f_scale * (1.0 - r))).ceil() as u64
}

/// Smallest power of two (at least 2) that is `>= x`.
fn pow2_at_least(what: &'static str, x: f64) -> Result<usize> {
    if !(x <= MAX_POW2_TARGET as f64) {
        return Err(Error::InfeasibleTarget {
            what,
            required: x,
            cap: MAX_POW2_TARGET,
        });
    }
    Ok((x.ceil().max(2.0) as usize).next_power_of_two())
}

/// Parameters meeting accuracy `epsilon`:
/// `eps' = F eps / 8`, `M >= gamma ln(8/(F eps) + 1)` and
/// `L >= ln(8/((1 - r) F eps)) / (1 - r)`, with `M` and `L` rounded up to
/// powers of two.
pub fn select_parameters(
    fs: &FunctionSpec,
    beta: f64,
    f_scale: f64,
    epsilon: f64,
) -> Result<ParameterPlan> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must lie in (0, 1/2]"
        )));
    }
    check_f(f_scale)?;
    let r = check_beta(fs, beta)?;
    let g = gamma(beta, r);
    let fe = f_scale * epsilon;
    let nodes = pow2_at_least("M", g * (8.0 / fe + 1.0).ln())?;
    let order = pow2_at_least("L", (8.0 / ((1.0 - r) * fe)).ln() / (1.0 - r))?;
    Ok(ParameterPlan {
        epsilon: Some(epsilon),
        f_scale,
        eps_prime: fe / 8.0,
        nodes,
        order,
        beta,
        r,
        gamma: g,
        aa_repetitions: aa_repetitions(f_scale, r),
    })
}

/// `(2/F) [beta^{-M}/(1 - beta^{-M}) + r^M/(1 - r^M) + eps' + r^L/(1 - r)]`
pub fn error_bound(
    f_scale: f64,
    beta: f64,
    r: f64,
    nodes: usize,
    order: usize,
    eps_prime: f64,
) -> Result<f64> {
    let bm = beta.powf(-(nodes as f64));
    let rm = r.powf(nodes as f64);
    for ratio in [bm, rm, r] {
        if !(ratio < 1.0) {
            return Err(Error::DegenerateBound { ratio });
        }
    }
    let tail = r.powf(order as f64) / (1.0 - r);
    Ok((2.0 / f_scale) * (bm / (1.0 - bm) + rm / (1.0 - rm) + eps_prime + tail))
}

/// `(3 F (1 - r) / 4)^2`
pub fn success_lower_bound(f_scale: f64, r: f64) -> f64 {
    (0.75 * f_scale * (1.0 - r)).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ComplexVector;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn f_scale_examples() {
        let one = FunctionSpec::polynomial(vec![c(1.0)], 4.0).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[0.3, 0.1], &[-0.2, 0.5]]);
        let b = ComplexVector::basis(2, 0);
        assert!((compute_f_scale(&one, &a, &b, 2.0).unwrap() - 0.5).abs() < 1e-14);

        let id = FunctionSpec::polynomial(vec![c(0.0), c(1.0)], 2.0).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((compute_f_scale(&id, &half, &b, 2.0).unwrap() - 0.125).abs() < 1e-14);
    }

    #[test]
    fn f_scale_of_exp_on_involution() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = ComplexVector::basis(2, 0);
        let fs = FunctionSpec::exp(2.0).unwrap();
        let expect = 0.131250731147144;
        assert!((compute_f_scale(&fs, &x, &b, 2.0).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn null_image() {
        let id = FunctionSpec::polynomial(vec![c(0.0), c(1.0)], 2.0).unwrap();
        let zero = ComplexMatrix::zeros(2);
        let b = ComplexVector::basis(2, 1);
        assert!(matches!(
            compute_f_scale(&id, &zero, &b, 1.5),
            Err(Error::NullImage { .. })
        ));
    }

    #[test]
    fn selection_example() {
        let fs = FunctionSpec::exp(4.0).unwrap();
        let p = select_parameters(&fs, 2.0, 1.0, 0.5).unwrap();
        assert_eq!((p.nodes, p.order), (8, 8));
        assert_eq!(p.eps_prime, 1.0 / 16.0);
        assert_eq!(p.gamma, 2.0);
        assert_eq!(p.aa_repetitions, 3);
        let q = select_parameters(&fs, 2.0, 0.4, 0.1).unwrap();
        assert!((q.eps_prime - 0.005).abs() < 1e-17);
    }

    #[test]
    fn selection_errors() {
        let fs = FunctionSpec::exp(4.0).unwrap();
        assert!(select_parameters(&fs, 2.0, 1.0, 0.6).is_err());
        assert!(select_parameters(&fs, 2.0, 0.0, 0.1).is_err());
        assert!(select_parameters(&fs, 5.0, 1.0, 0.1).is_err());
        assert!(matches!(
            select_parameters(&fs, 1.00001, 1.0, 0.1),
            Err(Error::InfeasibleTarget { what: "M", .. })
        ));
    }

    #[test]
    fn error_bound_example() {
        let got = error_bound(1.0, 2.0, 0.5, 8, 8, 0.0).unwrap();
        assert!((got - 0.03131127450980392).abs() < 1e-15, "{got}");
        assert!(error_bound(1.0, 2.0, 1.0, 8, 8, 0.0).is_err());
    }

    #[test]
    fn success_bounds() {
        assert_eq!(success_lower_bound(1.0, 0.0), 9.0 / 16.0);
        assert!((success_lower_bound(0.5, 0.5) - 0.03515625).abs() < 1e-17);
    }
}
