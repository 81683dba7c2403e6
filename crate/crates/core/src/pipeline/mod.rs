//! End-to-end run on exact statevectors: solve the stacked system, perturb the
//! solution by `eps'`, weight with the LCU unitary, average the k-register with
//! Hadamard gates and post-select.

mod params;
mod state;

pub use params::{
    aa_repetitions, compute_f_scale, error_bound, gamma, select_parameters, success_lower_bound,
    ParameterPlan, MAX_POW2_TARGET, NULL_IMAGE_TOL, REFERENCE_TOL,
};
pub use state::StateVector;

use serde::Serialize;

use crate::blocksys::{BlockDiagonal, BlockOracle, QueryCounts, SparseOracle, DEFAULT_SCALE};
use crate::contour::{node_weights, truncation_bound, ContourPlan};
use crate::lcu::{build_unitary, gate_count_estimate, truncate, weight};
use crate::numkernel::{
    spectral_norm, taylor_apply, ComplexMatrix, ComplexVector, FunctionSpec, QuantumStateView,
};
use crate::{rng, size_cap, Error, Result, C64};

/// Slack on `||A|| <= 1`.
pub const NORM_SLACK: f64 = 1e-9;

/// Below this post-selection probability the output state is undefined.
pub const NULL_PROJECTION_TOL: f64 = 1e-20;

/// Solves the scaled stacked system and returns the normalized solution with
/// the block weights `p_k = ||x_k|| / ||x'||`.
pub fn build_xprime_state(
    scaled: &BlockDiagonal,
    rhs: &[C64],
) -> Result<(QuantumStateView, Vec<f64>)> {
    let x = scaled.solve(rhs)?;
    let state = QuantumStateView::normalize(&x)?;
    let n = scaled.block_dim();
    let p = state
        .amplitudes()
        .chunks(n)
        .map(|blk| blk.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok((state, p))
}

/// Returns `cos(phi) x + sin(phi) u` with `phi = 2 asin(eps'/2)` and `u` a
/// seeded random unit vector orthogonal to `x`, so the output lies at
/// distance exactly `eps'` from `x`. In dimension one the perturbation is the
/// phase `e^{i phi}`.
pub fn inject_error(
    state: &QuantumStateView,
    eps_prime: f64,
    seed: u64,
) -> Result<QuantumStateView> {
    if !(0.0..=2.0).contains(&eps_prime) {
        return Err(Error::InvalidParameter(format!(
            "eps' = {eps_prime} must lie in [0, 2]"
        )));
    }
    let x = state.amplitudes();
    if eps_prime == 0.0 {
        return Ok(state.clone());
    }
    let phi = 2.0 * (eps_prime / 2.0).asin();
    let mut gen = rng::seeded(seed);
    if x.dim() > 1 {
        for _ in 0..16 {
            let v = rng::random_vector(&mut gen, x.dim());
            let mut u = v.clone();
            u.axpy(-x.dot(&v), x);
            let norm = u.norm();
            if norm > 1e-6 * v.norm() {
                let u = u.scale_real(1.0 / norm);
                let out = x.scale_real(phi.cos()).add(&u.scale_real(phi.sin()));
                return QuantumStateView::normalize(&out);
            }
        }
    }
    QuantumStateView::from_unit(x.scale(C64::from_polar(1.0, phi)))
}

/// Classical vectors and states recorded alongside a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Post-selected output state.
    pub post_state: ComplexVector,
    /// `f(A)b / ||f(A)b||`
    pub ref_state: ComplexVector,
    /// `(M / ||x'||) f(A) b`
    pub f_vec: ComplexVector,
    /// `sum_k g_k x_k / ||x'||`
    pub fm_vec: ComplexVector,
    /// `sum_k g̃_k x̃_k` over the perturbed unit state
    pub ftm_vec: ComplexVector,
    /// `||x'||` of the unscaled system `A' x' = 1 (x) b`
    pub xprime_norm: f64,
    /// `||x_k|| / ||x'||`
    pub block_weights: Vec<f64>,
    /// `||A||`
    pub norm_a: f64,
    /// `1 / alpha`
    pub ctilde: f64,
    pub disk_max: f64,
}

/// Measured quantities and bounds of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub success_prob: f64,
    pub success_lower_bound: f64,
    pub error_measured: f64,
    pub error_bound: f64,
    pub trunc_bound: f64,
    #[serde(rename = "F")]
    pub f_scale: f64,
    pub beta: f64,
    pub r: f64,
    #[serde(rename = "M")]
    pub nodes: usize,
    #[serde(rename = "L")]
    pub order: usize,
    pub eps_prime: f64,
    pub aa_repetitions: u64,
    pub gate_estimate: usize,
    pub query_counts: QueryCounts,
    pub seed: u64,
    #[serde(skip)]
    pub diagnostics: Diagnostics,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the algorithm for a unit `b` and `||A|| <= 1`.
pub fn run_algorithm(
    fs: &FunctionSpec,
    a: &ComplexMatrix,
    b: &[C64],
    plan: &ParameterPlan,
    seed: u64,
) -> Result<RunReport> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let norm_a = spectral_norm(a)?;
    if norm_a > 1.0 + NORM_SLACK {
        return Err(Error::NormTooLarge { norm: norm_a });
    }
    let (m, l, beta) = (plan.nodes, plan.order, plan.beta);
    let contour = ContourPlan::new(beta, fs.radius(), m, l, plan.eps_prime)?;
    let cap = size_cap();
    if n * m > cap {
        return Err(Error::SizeCap { size: n * m, cap });
    }

    // Step 1: read A' through the block oracles, solve A'/c and perturb.
    let oracle = SparseOracle::new(a, b)?;
    let block_oracle = BlockOracle::new(&oracle, m, beta)?;
    let scaled = block_oracle.read_blocks()?.scale(1.0 / DEFAULT_SCALE);
    let rhs = block_oracle.rhs_state();
    let raw = scaled.solve(rhs.amplitudes())?;
    let xprime_norm = raw.norm() * (m as f64).sqrt() / DEFAULT_SCALE;
    let (xstate, block_weights) = build_xprime_state(&scaled, rhs.amplitudes())?;
    let noisy = inject_error(&xstate, plan.eps_prime, seed)?;

    // Step 2: weighting unitary on the ancilla.
    let table = truncate(fs, l, beta)?;
    let unitary = build_unitary(&table, m)?;
    let mut psi = StateVector::from_stacked(noisy.amplitudes(), m)?.extend_ancilla(l);
    psi.apply_weighting(&unitary)?;

    // Steps 3 and 4: Hadamard on the k-register, project onto k = 0, j = 0.
    psi.hadamard_k();
    let branch = psi.success_branch();
    let success_prob = branch.norm_sqr();
    if !(success_prob >= NULL_PROJECTION_TOL) {
        return Err(Error::NullProjection { prob: success_prob });
    }
    let post_state = branch.scale_real(1.0 / success_prob.sqrt());

    let fb = taylor_apply(fs, a, b, REFERENCE_TOL)?;
    let ref_state = QuantumStateView::normalize(&fb)?.into_amplitudes();
    let error_measured = post_state.distance(&ref_state);

    let weights = node_weights(fs, &contour)?;
    let mut fm_vec = ComplexVector::zeros(n);
    let mut ftm_vec = ComplexVector::zeros(n);
    for (k, &wk) in weights.iter().enumerate().take(m) {
        let xk: ComplexVector = xstate.amplitudes()[k * n..(k + 1) * n].to_vec().into();
        let xtk: ComplexVector = noisy.amplitudes()[k * n..(k + 1) * n].to_vec().into();
        fm_vec.axpy(wk, &xk);
        ftm_vec.axpy(weight(&table, k, m), &xtk);
    }
    let f_vec = fb.scale_real(m as f64 / xprime_norm);

    Ok(RunReport {
        success_prob,
        success_lower_bound: success_lower_bound(plan.f_scale, plan.r),
        error_measured,
        error_bound: error_bound(plan.f_scale, beta, plan.r, m, l, plan.eps_prime)?,
        trunc_bound: truncation_bound(fs, norm_a, &contour)?,
        f_scale: plan.f_scale,
        beta,
        r: plan.r,
        nodes: m,
        order: l,
        eps_prime: plan.eps_prime,
        aa_repetitions: plan.aa_repetitions,
        gate_estimate: gate_count_estimate(m, l)?,
        query_counts: oracle.counts(),
        seed,
        diagnostics: Diagnostics {
            post_state,
            ref_state,
            f_vec,
            fm_vec,
            ftm_vec,
            xprime_norm,
            block_weights,
            norm_a,
            ctilde: table.ctilde(),
            disk_max: fs.disk_max(),
        },
    })
}

/// Smallest power-of-two `M` (from 2 up to `max_nodes`) whose run with
/// `eps' = 0` and truncation order `order` reaches `error <= epsilon`.
pub fn minimal_nodes(
    fs: &FunctionSpec,
    a: &ComplexMatrix,
    b: &[C64],
    beta: f64,
    order: usize,
    epsilon: f64,
    max_nodes: usize,
) -> Result<Option<usize>> {
    let f_scale = compute_f_scale(fs, a, b, beta)?;
    let mut m = 2;
    while m <= max_nodes {
        let plan = ParameterPlan::explicit(fs, beta, f_scale, m, order, 0.0)?;
        if run_algorithm(fs, a, b, &plan, 0)?.error_measured <= epsilon {
            return Ok(Some(m));
        }
        m *= 2;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocksys::assemble_rhs;
    use crate::contour::contour_apply;
    use crate::numkernel::lu_solve;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_matrix() -> ComplexMatrix {
        let m = ComplexMatrix::from_fn(3, |i, j| {
            c(0.2 * (i as f64) - 0.1 * (j as f64), 0.05 * ((i * j) as f64))
        });
        m.scale_real(0.9 / spectral_norm(&m).unwrap())
    }

    #[test]
    fn xprime_of_zero_matrix() {
        let blocks = BlockDiagonal::shifted(&ComplexMatrix::zeros(2), 1.7, 2).unwrap();
        let rhs = assemble_rhs(&[c(1.0, 0.0), c(0.0, 0.0)], 2).unwrap();
        let (state, p) = build_xprime_state(&blocks, &rhs).unwrap();
        for pk in &p {
            assert!((pk - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!((state.amplitudes()[2] + c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn xprime_blocks_match_per_block_solves() {
        let a = sample_matrix();
        let b = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let blocks = BlockDiagonal::shifted(&a, 1.5, 4).unwrap();
        let rhs = assemble_rhs(&b, 4).unwrap();
        let (state, p) = build_xprime_state(&blocks, &rhs).unwrap();
        assert!((p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        for k in 0..4 {
            let xk = lu_solve(&blocks.blocks()[k], &b).unwrap();
            let got: ComplexVector = state.amplitudes()[3 * k..3 * k + 3].to_vec().into();
            let ratio = got[0] / xk[0];
            assert!(got.distance(&xk.scale(ratio)) < 1e-13);
        }
    }

    #[test]
    fn injected_error_distance() {
        let v: ComplexVector = (0..6).map(|i| c(i as f64, 1.0)).collect();
        let x = QuantumStateView::normalize(&v).unwrap();
        assert_eq!(inject_error(&x, 0.0, 1).unwrap(), x);
        let y = inject_error(&x, 0.1, 42).unwrap();
        assert!((x.distance(&y) - 0.1).abs() < 1e-12);
        assert!((y.amplitudes().norm() - 1.0).abs() < 1e-12);
        let z = inject_error(&x, 2.0, 42).unwrap();
        assert!(z.amplitudes().distance(&x.amplitudes().scale_real(-1.0)) < 1e-12);
        let one = QuantumStateView::normalize(&vec![c(0.0, 1.0)].into()).unwrap();
        assert!((inject_error(&one, 0.3, 5).unwrap().distance(&one) - 0.3).abs() < 1e-12);
        assert!(inject_error(&x, 2.5, 1).is_err());
    }

    #[test]
    fn constant_function_success_probability() {
        let fs = FunctionSpec::polynomial(vec![c(1.0, 0.0)], 3.0).unwrap();
        let a = sample_matrix();
        let b = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let f = compute_f_scale(&fs, &a, &b, 1.7).unwrap();
        let plan = ParameterPlan::explicit(&fs, 1.7, f, 64, 2, 0.0).unwrap();
        let rep = run_algorithm(&fs, &a, &b, &plan, 0).unwrap();
        let d = &rep.diagnostics;
        assert!(rep.error_measured < 1e-12, "{}", rep.error_measured);
        let expect = d.ctilde.powi(2) * d.ftm_vec.norm_sqr() / 64.0;
        assert!((rep.success_prob - expect).abs() < 1e-12);
        assert_eq!(d.ctilde, 1.0);
    }

    #[test]
    fn exact_collapse_to_contour_state() {
        let fs = FunctionSpec::exp(3.0).unwrap();
        let a = sample_matrix();
        let b = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let beta = 1.5;
        let f = compute_f_scale(&fs, &a, &b, beta).unwrap();
        let plan = ParameterPlan::explicit(&fs, beta, f, 8, 64, 0.0).unwrap();
        let rep = run_algorithm(&fs, &a, &b, &plan, 0).unwrap();
        let cplan = ContourPlan::quadrature(&fs, beta, 8).unwrap();
        let fm = contour_apply(&fs, &a, &b, &cplan).unwrap();
        let target = fm.scale_real(1.0 / fm.norm());
        let ratio = rep.diagnostics.post_state.dot(&target);
        assert!((ratio.norm() - 1.0).abs() < 1e-10);
        assert!(rep.diagnostics.post_state.distance(&target) < 1e-10);
    }

    #[test]
    fn report_json_keys() {
        let fs = FunctionSpec::exp(2.0).unwrap();
        let a = sample_matrix();
        let b = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let f = compute_f_scale(&fs, &a, &b, 1.4).unwrap();
        let plan = select_parameters(&fs, 1.4, f, 0.25).unwrap();
        let rep = run_algorithm(&fs, &a, &b, &plan, 9).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        for k in [
            "success_prob",
            "success_lower_bound",
            "error_measured",
            "error_bound",
            "trunc_bound",
            "F",
            "beta",
            "r",
            "M",
            "L",
            "eps_prime",
            "aa_repetitions",
            "gate_estimate",
            "query_counts",
            "seed",
        ] {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(v["query_counts"]["pb"], 1);
        assert!(rep.error_measured <= 0.25);
        assert!(rep.error_measured <= rep.error_bound);
        assert!(rep.success_prob >= rep.success_lower_bound - 1e-9);
    }

    #[test]
    fn norm_too_large() {
        let fs = FunctionSpec::exp(2.0).unwrap();
        let a = ComplexMatrix::identity(2).scale_real(1.5);
        let plan = ParameterPlan::explicit(&fs, 1.4, 0.1, 4, 4, 0.0).unwrap();
        assert!(matches!(
            run_algorithm(&fs, &a, &[c(1.0, 0.0), c(0.0, 0.0)], &plan, 0),
            Err(Error::NormTooLarge { .. })
        ));
    }
}
