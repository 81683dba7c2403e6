//! Named invariant checks run by the `verify` command. Each check draws its
//! instances from the given seed and reports the worst margin it saw.

use crate::blocksys::{
    condition_bounds, solve_via_dilation, BlockDiagonal, BlockOracle, SparseOracle,
};
use crate::contour::{
    contour_matrix, periodized_indicator, truncation_bound, unit_root, ContourPlan,
};
use crate::lcu::{build_unitary, reassemble_phases, truncate, weight};
use crate::numkernel::{
    inverse, lu_solve, spectral_norm, taylor_matrix, ComplexMatrix, ComplexVector, FunctionSpec,
};
use crate::pipeline::{
    compute_f_scale, run_algorithm, select_parameters, ParameterPlan, RunReport,
};
use crate::rng::{self, instance_set, jordan_like, Instance};
use crate::{Error, Result, C64};

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

/// A named invariant belonging to one module.
#[derive(Debug, Clone, Copy)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    run: fn(u64) -> Result<Outcome>,
}

impl Check {
    pub fn run(&self, seed: u64) -> Outcome {
        (self.run)(seed).unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        })
    }
}

pub const MODULES: [&str; 5] = ["numkernel", "contour", "blocksys", "lcu", "pipeline"];

pub fn registry() -> Vec<Check> {
    macro_rules! check {
        ($module:literal, $name:literal, $f:path) => {
            Check {
                module: $module,
                name: concat!($module, ":", $name),
                run: $f,
            }
        };
    }
    vec![
        check!("numkernel", "vector-bound", vector_bound),
        check!("numkernel", "cauchy-estimate", cauchy_estimate),
        check!("numkernel", "norm-homogeneity", norm_homogeneity),
        check!("contour", "truncation-bound", contour_truncation),
        check!("contour", "periodized-indicator", indicator),
        check!("blocksys", "norm-bound", block_norm),
        check!("blocksys", "inverse-norm-bound", block_inverse_norm),
        check!("blocksys", "condition-bound", block_condition),
        check!("blocksys", "query-accounting", query_accounting),
        check!("blocksys", "dilation-solve", dilation),
        check!("lcu", "unitarity", lcu_unitarity),
        check!("lcu", "amplitude", lcu_amplitude),
        check!("lcu", "residual-norm", lcu_residual),
        check!("lcu", "truncation-error", lcu_truncation),
        check!("lcu", "phase-factorization", lcu_phases),
        check!("pipeline", "error-target", pipe_target),
        check!("pipeline", "error-bound", pipe_bound),
        check!("pipeline", "success-probability", pipe_success),
        check!("pipeline", "probability-identity", pipe_identity),
        check!("pipeline", "quadrature-vector-bound", pipe_quadrature_vec),
        check!("pipeline", "truncated-vector-bound", pipe_truncated_vec),
        check!("pipeline", "exact-collapse", pipe_collapse),
    ]
}

/// Checks whose module or full name equals `filter`; all checks for `None`.
pub fn select(filter: Option<&str>) -> Result<Vec<Check>> {
    let all = registry();
    let Some(f) = filter else { return Ok(all) };
    let picked: Vec<Check> = all
        .into_iter()
        .filter(|c| c.module == f || c.name == f)
        .collect();
    if picked.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "unknown module or invariant {f:?}; modules are {}",
            MODULES.join(", ")
        )));
    }
    Ok(picked)
}

/// Tracks the worst `measured - bound` over a set of cases.
struct Margin {
    cases: usize,
    worst: f64,
    tol: f64,
}

impl Margin {
    fn new(tol: f64) -> Self {
        Self {
            cases: 0,
            worst: f64::NEG_INFINITY,
            tol,
        }
    }

    fn add(&mut self, measured: f64, bound: f64) {
        self.cases += 1;
        let d = measured - bound;
        self.worst = if d.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(d)
        };
    }

    fn finish(self) -> Result<Outcome> {
        Ok(Outcome {
            passed: self.cases > 0 && self.worst <= self.tol,
            detail: format!("cases={} worst_excess={:.3e}", self.cases, self.worst),
        })
    }
}

fn catalog() -> Result<Vec<FunctionSpec>> {
    let c = |re: f64| C64::new(re, 0.0);
    Ok(vec![
        FunctionSpec::exp(2.0)?,
        FunctionSpec::cos(2.0)?,
        FunctionSpec::sin(2.0)?,
        FunctionSpec::geometric(3.0, 2.0)?,
        FunctionSpec::polynomial(vec![c(0.5), c(-1.0), c(0.25), c(0.125)], 2.0)?,
    ])
}

fn instances(seed: u64) -> Result<Vec<Instance>> {
    let mut set = instance_set(seed, 4, &[4, 8])?;
    set.push(Instance {
        label: "jordan4".into(),
        matrix: jordan_like(4, 0.5)?,
        hermitian: false,
    });
    Ok(set)
}

fn vector_bound(seed: u64) -> Result<Outcome> {
    let mut g = rng::seeded(seed);
    let mut m = Margin::new(1e-12);
    for _ in 0..1000 {
        let u = rng::random_vector(&mut g, 6);
        let v = u.add(&rng::random_vector(&mut g, 6).scale_real(0.5));
        let lhs = u
            .scale_real(1.0 / u.norm())
            .distance(&v.scale_real(1.0 / v.norm()));
        m.add(lhs, 2.0 * u.distance(&v) / u.norm());
    }
    m.finish()
}

fn cauchy_estimate(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-12);
    for fs in catalog()? {
        for j in 0..=64 {
            let bound = fs.disk_max() / fs.radius().powi(j);
            m.add(fs.coeff(j as usize).norm(), bound * (1.0 + 1e-12));
        }
    }
    m.finish()
}

fn norm_homogeneity(seed: u64) -> Result<Outcome> {
    let mut g = rng::seeded(seed);
    let mut m = Margin::new(1e-9);
    for n in [2, 4, 8] {
        let a = ComplexMatrix::from_fn(n, |_, _| rng::random_complex(&mut g));
        let s = rng::random_complex(&mut g);
        let lhs = spectral_norm(&a.scale(s))?;
        let rhs = s.norm() * spectral_norm(&a)?;
        m.add((lhs - rhs).abs(), 1e-9 * rhs);
    }
    m.finish()
}

fn contour_truncation(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    for inst in instances(seed)? {
        let norm_a = spectral_norm(&inst.matrix)?;
        for fs in catalog()?.iter().take(4) {
            let exact = taylor_matrix(fs, &inst.matrix, 1e-14)?;
            for beta in [1.2, 1.5] {
                for nodes in [4, 8, 16] {
                    let plan = ContourPlan::quadrature(fs, beta, nodes)?;
                    let err = spectral_norm(&exact.sub(&contour_matrix(fs, &inst.matrix, &plan)?))?;
                    m.add(err, truncation_bound(fs, norm_a, &plan)?);
                }
            }
        }
    }
    m.finish()
}

fn indicator(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(0.0);
    for nodes in [1, 2, 4, 8, 16, 32] {
        for y in -70i64..=70 {
            let expect = if y.rem_euclid(nodes as i64) == 0 {
                1.0
            } else {
                0.0
            };
            m.add((periodized_indicator(nodes, y) - expect).abs(), 0.0);
        }
    }
    m.finish()
}

fn stacked_cases(seed: u64, mut each: impl FnMut(&BlockDiagonal, f64) -> Result<()>) -> Result<()> {
    for inst in instances(seed)? {
        for beta in [1.2, 1.5, 2.0] {
            for nodes in [2, 4, 8] {
                each(&BlockDiagonal::shifted(&inst.matrix, beta, nodes)?, beta)?;
            }
        }
    }
    Ok(())
}

fn block_norms(bd: &BlockDiagonal) -> Result<(f64, f64)> {
    let mut norm: f64 = 0.0;
    let mut inv: f64 = 0.0;
    for blk in bd.blocks() {
        norm = norm.max(spectral_norm(blk)?);
        inv = inv.max(spectral_norm(&inverse(blk)?)?);
    }
    Ok((norm, inv))
}

fn block_norm(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    stacked_cases(seed, |bd, beta| {
        m.add(block_norms(bd)?.0, condition_bounds(beta)?.norm);
        Ok(())
    })?;
    m.finish()
}

fn block_inverse_norm(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    stacked_cases(seed, |bd, beta| {
        m.add(block_norms(bd)?.1, condition_bounds(beta)?.inverse_norm);
        Ok(())
    })?;
    m.finish()
}

fn block_condition(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(0.0);
    stacked_cases(seed, |bd, beta| {
        let (n, i) = block_norms(bd)?;
        // strict inequality
        m.add(n * i, condition_bounds(beta)?.condition - 1e-15);
        Ok(())
    })?;
    m.finish()
}

fn query_accounting(seed: u64) -> Result<Outcome> {
    let mut g = rng::seeded(seed);
    let mut m = Margin::new(0.0);
    for n in 1..=4 {
        let a = ComplexMatrix::from_fn(n, |i, j| {
            if (i + j) % 3 == 0 {
                rng::random_complex(&mut g)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let b = ComplexVector::basis(n, 0);
        let base = SparseOracle::new(&a, &b)?;
        for nodes in [1, 2, 4] {
            let blk = BlockOracle::new(&base, nodes, 1.5)?;
            for k in 0..nodes {
                for k2 in 0..nodes {
                    for i in 0..n {
                        for j in 0..n {
                            let before = base.counts().oa;
                            let _ = blk.entry((k, i), (k2, j));
                            let used = (base.counts().oa - before) as f64;
                            m.add((used - if k == k2 { 1.0 } else { 0.0 }).abs(), 0.0);
                        }
                    }
                }
            }
        }
    }
    m.finish()
}

fn dilation(seed: u64) -> Result<Outcome> {
    let mut g = rng::seeded(seed);
    let mut m = Margin::new(1e-9);
    for idx in 0..20 {
        let n = 2 + idx % 5;
        let a = ComplexMatrix::from_fn(n, |_, _| rng::random_complex(&mut g))
            .add(&ComplexMatrix::identity(n));
        let b = rng::random_vector(&mut g, n);
        let direct = lu_solve(&a, &b)?;
        m.add(
            solve_via_dilation(&a, &b)?.distance(&direct),
            1e-9 * direct.norm().max(1.0),
        );
    }
    m.finish()
}

fn lcu_cases(mut each: impl FnMut(&FunctionSpec, usize, usize, f64) -> Result<()>) -> Result<()> {
    for fs in catalog()? {
        for order in [2, 4, 8, 16] {
            for nodes in [2, 4, 8, 16] {
                each(&fs, order, nodes, 1.4)?;
            }
        }
    }
    Ok(())
}

fn lcu_unitarity(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-10);
    lcu_cases(|fs, l, mm, beta| {
        let u = build_unitary(&truncate(fs, l, beta)?, mm)?;
        for k in 0..mm {
            let blk = u.block(k);
            m.add(
                blk.adjoint()
                    .matmul(&blk)
                    .sub(&ComplexMatrix::identity(l))
                    .max_abs(),
                0.0,
            );
        }
        Ok(())
    })?;
    m.finish()
}

fn lcu_amplitude(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-10);
    lcu_cases(|fs, l, mm, beta| {
        let t = truncate(fs, l, beta)?;
        let u = build_unitary(&t, mm)?;
        for k in 0..mm {
            m.add(
                (u.block(k)[(0, 0)] - weight(&t, k, mm) * t.ctilde()).norm(),
                0.0,
            );
        }
        Ok(())
    })?;
    m.finish()
}

fn lcu_residual(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-10);
    lcu_cases(|fs, l, mm, beta| {
        let t = truncate(fs, l, beta)?;
        let u = build_unitary(&t, mm)?;
        for k in 0..mm {
            let col = u.column(k);
            let rest: f64 = col[1..].iter().map(|z| z.norm_sqr()).sum();
            let expect = 1.0 - (weight(&t, k, mm) * t.ctilde()).norm_sqr();
            m.add((rest - expect).abs(), 0.0);
        }
        Ok(())
    })?;
    m.finish()
}

fn lcu_truncation(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-12);
    lcu_cases(|fs, l, mm, beta| {
        let t = truncate(fs, l, beta)?;
        let r = beta / fs.radius();
        for k in 0..mm {
            let u = unit_root(k, mm);
            let g = fs.eval(u * beta, 1e-15)? * u;
            m.add(
                (g - weight(&t, k, mm)).norm(),
                fs.disk_max() * r.powi(l as i32) / (1.0 - r),
            );
        }
        Ok(())
    })?;
    m.finish()
}

fn lcu_phases(_seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-10);
    for mm in [2, 4, 8, 16] {
        for l in [2, 4, 8, 16] {
            let diag = reassemble_phases(mm, l)?;
            for k in 0..mm {
                for j in 0..l {
                    m.add(
                        (diag[k * l + j] - unit_root(k * (j + 1) % mm, mm)).norm(),
                        0.0,
                    );
                }
            }
        }
    }
    m.finish()
}

/// Runs with selected parameters on catalog functions and seeded matrices.
fn pipeline_runs(seed: u64) -> Result<Vec<(f64, RunReport)>> {
    let mut out = Vec::new();
    let fns = catalog()?;
    for (idx, inst) in instances(seed)?.iter().enumerate() {
        let b = ComplexVector::basis(inst.matrix.dim(), 0);
        let fs = &fns[idx % fns.len()];
        let beta = fs.radius().sqrt();
        let f = compute_f_scale(fs, &inst.matrix, &b, beta)?;
        for eps in [0.25, 0.1] {
            let plan = select_parameters(fs, beta, f, eps)?;
            out.push((
                eps,
                run_algorithm(fs, &inst.matrix, &b, &plan, seed.wrapping_add(idx as u64))?,
            ));
        }
    }
    Ok(out)
}

fn pipe_target(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(0.0);
    for (eps, rep) in pipeline_runs(seed)? {
        m.add(rep.error_measured, eps);
    }
    m.finish()
}

fn pipe_bound(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    for (_, rep) in pipeline_runs(seed)? {
        m.add(rep.error_measured, rep.error_bound);
    }
    m.finish()
}

fn pipe_success(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    for (_, rep) in pipeline_runs(seed)? {
        m.add(rep.success_lower_bound, rep.success_prob);
    }
    m.finish()
}

fn pipe_identity(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-10);
    for (_, rep) in pipeline_runs(seed)? {
        let d = &rep.diagnostics;
        let expect = d.ctilde.powi(2) * d.ftm_vec.norm_sqr() / rep.nodes as f64;
        m.add((rep.success_prob - expect).abs(), 0.0);
    }
    m.finish()
}

fn pipe_quadrature_vec(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    for (_, rep) in pipeline_runs(seed)? {
        let d = &rep.diagnostics;
        m.add(
            d.f_vec.distance(&d.fm_vec),
            rep.nodes as f64 / d.xprime_norm * rep.trunc_bound,
        );
    }
    m.finish()
}

fn pipe_truncated_vec(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    for (_, rep) in pipeline_runs(seed)? {
        let d = &rep.diagnostics;
        let tail = rep.r.powi(rep.order as i32) / (1.0 - rep.r);
        let bound = (rep.nodes as f64).sqrt() * d.disk_max * (rep.eps_prime + tail);
        m.add(d.fm_vec.distance(&d.ftm_vec), bound);
    }
    m.finish()
}

fn pipe_collapse(seed: u64) -> Result<Outcome> {
    let mut m = Margin::new(1e-9);
    for inst in instances(seed)? {
        let b = ComplexVector::basis(inst.matrix.dim(), 0);
        let fs = FunctionSpec::exp(2.0)?;
        let beta = 1.4;
        let f = compute_f_scale(&fs, &inst.matrix, &b, beta)?;
        let plan = ParameterPlan::explicit(&fs, beta, f, 128, 128, 0.0)?;
        m.add(
            run_algorithm(&fs, &inst.matrix, &b, &plan, seed)?.error_measured,
            0.0,
        );
    }
    m.finish()
}
