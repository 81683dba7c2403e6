//! Command-line front end: `run`, `sweep` and `verify`.

mod config;

pub use config::{parse_list, ConfigFile};

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::blocksys::io::{read_matrix_market, read_vector};
use crate::numkernel::{spectral_norm, ComplexMatrix, ComplexVector, FunctionSpec};
use crate::pipeline::{
    compute_f_scale, minimal_nodes, run_algorithm, select_parameters, ParameterPlan, RunReport,
    NORM_SLACK,
};
use crate::{verify, Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Default sweep for the scaling mode: `eps = 2^-2, ..., 2^-10`.
pub const SCALING_EPSILONS: [f64; 9] = [
    0.25,
    0.125,
    0.0625,
    0.03125,
    0.015625,
    0.0078125,
    0.00390625,
    0.001953125,
    0.0009765625,
];
/// Truncation order used by the scaling mode unless `--order` is given.
pub const SCALING_ORDER: usize = 128;
/// Largest `M` tried by the scaling mode.
pub const SCALING_MAX_NODES: usize = 1 << 12;

pub const CSV_HEADER: &str = "epsilon,M,L,error_measured,error_bound,success_prob";

#[derive(Debug, Parser)]
#[command(
    name = "matfunc",
    version,
    about = "Prepare f(A)|b>/||f(A)|b>|| by contour quadrature on simulated statevectors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the algorithm once and write a JSON report.
    Run(ExperimentArgs),
    /// Run over a list of epsilons or node counts and write CSV.
    Sweep(SweepArgs),
    /// Check the named invariants on seeded random instances.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionName {
    Exp,
    Cos,
    Sin,
    Geometric,
    Poly,
    Custom,
}

impl std::str::FromStr for FunctionName {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Matrix Market coordinate file for A.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Right-hand side, one `re im` pair per line. Defaults to |0...0>.
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub function: Option<FunctionName>,
    /// Radius R of the disk where f is analytic.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Pole s of the geometric function 1/(1 - z/s).
    #[arg(long, allow_hyphen_values = true)]
    pub pole: Option<f64>,
    /// Taylor coefficients for `poly` and `custom`, one `re im` per line.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Quadrature radius; defaults to sqrt(R).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Target accuracy; selects M, L and eps'.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of quadrature nodes M.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Truncation order L.
    #[arg(long)]
    pub order: Option<usize>,
    /// Injected linear-solver error eps'.
    #[arg(long)]
    pub hhl_error: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rescale A to spectral norm 1.
    #[arg(long)]
    pub normalize: bool,
    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Comma-separated target accuracies.
    #[arg(long)]
    pub epsilon_list: Option<String>,
    /// Comma-separated node counts, run with explicit L and eps'.
    #[arg(long)]
    pub nodes_list: Option<String>,
    /// Report the smallest M reaching each epsilon with eps' = 0.
    #[arg(long)]
    pub scaling: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict to one module or one invariant name.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub matrix_path: PathBuf,
    pub rhs_path: Option<PathBuf>,
    pub function: FunctionName,
    pub radius: Option<f64>,
    pub pole: Option<f64>,
    pub coeffs_path: Option<PathBuf>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub nodes: Option<usize>,
    pub order: Option<usize>,
    pub hhl_error: Option<f64>,
    pub seed: u64,
    pub normalize: bool,
    pub out: Option<PathBuf>,
    pub epsilon_list: Option<Vec<f64>>,
    pub nodes_list: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn resolve(args: &ExperimentArgs, lists: Option<&SweepArgs>) -> Result<Self> {
        let cfg = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let matrix_path = args
            .matrix
            .clone()
            .or_else(|| cfg.path("matrix"))
            .ok_or_else(|| Error::Parse("--matrix is required".into()))?;
        let epsilon_list = match lists.and_then(|l| l.epsilon_list.as_deref()) {
            Some(v) => Some(parse_list(v, "--epsilon-list")?),
            None => cfg.list("epsilon_list")?,
        };
        let nodes_list = match lists.and_then(|l| l.nodes_list.as_deref()) {
            Some(v) => Some(parse_list(v, "--nodes-list")?),
            None => cfg.list("nodes_list")?,
        };
        Ok(Self {
            matrix_path,
            rhs_path: args.rhs.clone().or_else(|| cfg.path("rhs")),
            function: match args.function {
                Some(f) => f,
                None => cfg.get("function")?.unwrap_or(FunctionName::Exp),
            },
            radius: pick(args.radius, &cfg, "radius")?,
            pole: pick(args.pole, &cfg, "pole")?,
            coeffs_path: args.coeffs.clone().or_else(|| cfg.path("coeffs")),
            beta: pick(args.beta, &cfg, "beta")?,
            epsilon: pick(args.epsilon, &cfg, "epsilon")?,
            nodes: pick(args.nodes, &cfg, "nodes")?,
            order: pick(args.order, &cfg, "order")?,
            hhl_error: pick(args.hhl_error, &cfg, "hhl_error")?,
            seed: pick(args.seed, &cfg, "seed")?.unwrap_or(0),
            normalize: args.normalize || cfg.flag("normalize")?,
            out: args.out.clone().or_else(|| cfg.path("out")),
            epsilon_list,
            nodes_list,
        })
    }

    pub fn function_spec(&self) -> Result<FunctionSpec> {
        let radius = self
            .radius
            .ok_or_else(|| Error::Parse("--radius is required".into()))?;
        match self.function {
            FunctionName::Exp => FunctionSpec::exp(radius),
            FunctionName::Cos => FunctionSpec::cos(radius),
            FunctionName::Sin => FunctionSpec::sin(radius),
            FunctionName::Geometric => {
                let pole = self
                    .pole
                    .ok_or_else(|| Error::Parse("--pole is required for geometric".into()))?;
                FunctionSpec::geometric(pole, radius)
            }
            FunctionName::Poly | FunctionName::Custom => {
                let path = self.coeffs_path.as_ref().ok_or_else(|| {
                    Error::Parse("--coeffs is required for poly and custom".into())
                })?;
                let coeffs = read_vector(path)?.into_inner();
                if self.function == FunctionName::Poly {
                    FunctionSpec::polynomial(coeffs, radius)
                } else {
                    FunctionSpec::custom(coeffs, radius)
                }
            }
        }
    }

    /// `beta`, defaulting to `sqrt(R)`.
    pub fn beta_for(&self, fs: &FunctionSpec) -> f64 {
        self.beta.unwrap_or_else(|| fs.radius().sqrt())
    }

    /// Loads `A` (rescaled if requested) and the unit right-hand side.
    pub fn load_problem(&self) -> Result<(ComplexMatrix, ComplexVector)> {
        let mut a = read_matrix_market(&self.matrix_path)?;
        let s = spectral_norm(&a)?;
        if self.normalize {
            if s > 0.0 {
                a = a.scale_real(1.0 / s);
            }
        } else if s > 1.0 + NORM_SLACK {
            return Err(Error::NormTooLarge { norm: s });
        }
        let b = match &self.rhs_path {
            Some(p) => read_vector(p)?,
            None => ComplexVector::basis(a.dim(), 0),
        };
        if b.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                actual: b.dim(),
            });
        }
        let norm = b.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok((a, b.scale_real(1.0 / norm)))
    }

    /// Plan from `epsilon` alone or from all of `nodes`, `order` and
    /// `hhl_error`.
    pub fn plan(&self, fs: &FunctionSpec, beta: f64, f_scale: f64) -> Result<ParameterPlan> {
        let explicit = [
            self.nodes.is_some(),
            self.order.is_some(),
            self.hhl_error.is_some(),
        ];
        match (self.epsilon, explicit) {
            (Some(_), e) if e.iter().any(|&x| x) => Err(Error::Parse(
                "--epsilon cannot be combined with --nodes, --order or --hhl-error".into(),
            )),
            (Some(eps), _) => select_parameters(fs, beta, f_scale, eps),
            (None, [true, true, true]) => ParameterPlan::explicit(
                fs,
                beta,
                f_scale,
                self.nodes.unwrap_or_default(),
                self.order.unwrap_or_default(),
                self.hhl_error.unwrap_or_default(),
            ),
            (None, _) => Err(Error::Parse(
                "give either --epsilon or all of --nodes, --order and --hhl-error".into(),
            )),
        }
    }
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::ZeroVector
        | Error::NotPowerOfTwo { .. }
        | Error::BadScale { .. } => EXIT_USAGE,
        _ => EXIT_PRECONDITION,
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Parse(format!("stdout: {e}")))
        }
    }
}

/// Pass criterion of a single report.
pub fn report_passes(rep: &RunReport, epsilon: Option<f64>) -> bool {
    match epsilon {
        Some(eps) => rep.error_measured <= eps && rep.success_prob >= rep.success_lower_bound,
        None => rep.error_measured <= rep.error_bound,
    }
}

pub fn cmd_run(args: &ExperimentArgs) -> Result<i32> {
    let cfg = ExperimentConfig::resolve(args, None)?;
    let fs = cfg.function_spec()?;
    let beta = cfg.beta_for(&fs);
    let (a, b) = cfg.load_problem()?;
    let f_scale = compute_f_scale(&fs, &a, &b, beta)?;
    let plan = cfg.plan(&fs, beta, f_scale)?;
    let rep = run_algorithm(&fs, &a, &b, &plan, cfg.seed)?;
    emit(cfg.out.as_deref(), &(rep.to_json() + "\n"))?;
    Ok(if report_passes(&rep, plan.epsilon) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(epsilon: Option<f64>, rep: &RunReport) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        epsilon.map(csv_float).unwrap_or_default(),
        rep.nodes,
        rep.order,
        csv_float(rep.error_measured),
        csv_float(rep.error_bound),
        csv_float(rep.success_prob),
    )
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let cfg = ExperimentConfig::resolve(&args.experiment, Some(args))?;
    // The scaling mode may take its epsilons from --epsilon-list.
    let valid = match (
        args.scaling,
        cfg.epsilon_list.is_some(),
        cfg.nodes_list.is_some(),
    ) {
        (true, _, false) => true,
        (false, eps, nodes) => eps != nodes,
        _ => false,
    };
    if !valid {
        return Err(Error::Parse(
            "give exactly one of --epsilon-list, --nodes-list or --scaling".into(),
        ));
    }
    let fs = cfg.function_spec()?;
    let beta = cfg.beta_for(&fs);
    let (a, b) = cfg.load_problem()?;
    let f_scale = compute_f_scale(&fs, &a, &b, beta)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut all_pass = true;

    if args.scaling {
        let epsilons = cfg
            .epsilon_list
            .clone()
            .unwrap_or_else(|| SCALING_EPSILONS.to_vec());
        let order = cfg.order.unwrap_or(SCALING_ORDER);
        let mut last = 0;
        for eps in epsilons {
            match minimal_nodes(&fs, &a, &b, beta, order, eps, SCALING_MAX_NODES)? {
                Some(m) => {
                    let plan = ParameterPlan::explicit(&fs, beta, f_scale, m, order, 0.0)?;
                    let rep = run_algorithm(&fs, &a, &b, &plan, cfg.seed)?;
                    all_pass &= m >= last;
                    last = m;
                    csv.push_str(&csv_row(Some(eps), &rep));
                }
                None => {
                    all_pass = false;
                    let _ = writeln!(csv, "{},,{order},,,", csv_float(eps));
                }
            }
        }
    } else if let Some(epsilons) = &cfg.epsilon_list {
        if cfg.nodes.is_some() || cfg.order.is_some() || cfg.hhl_error.is_some() {
            return Err(Error::Parse(
                "--epsilon-list cannot be combined with --nodes, --order or --hhl-error".into(),
            ));
        }
        for &eps in epsilons {
            let plan = select_parameters(&fs, beta, f_scale, eps)?;
            let rep = run_algorithm(&fs, &a, &b, &plan, cfg.seed)?;
            all_pass &= report_passes(&rep, Some(eps));
            csv.push_str(&csv_row(Some(eps), &rep));
        }
    } else if let Some(nodes) = &cfg.nodes_list {
        let order = cfg
            .order
            .ok_or_else(|| Error::Parse("--nodes-list needs --order".into()))?;
        let eps_prime = cfg.hhl_error.unwrap_or(0.0);
        for &m in nodes {
            let plan = ParameterPlan::explicit(&fs, beta, f_scale, m, order, eps_prime)?;
            let rep = run_algorithm(&fs, &a, &b, &plan, cfg.seed)?;
            all_pass &= report_passes(&rep, None);
            csv.push_str(&csv_row(cfg.epsilon, &rep));
        }
    }
    emit(cfg.out.as_deref(), &csv)?;
    Ok(if all_pass { EXIT_PASS } else { EXIT_FAIL })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let checks = verify::select(args.only.as_deref())?;
    let mut text = String::new();
    let mut first_failure = None;
    let mut passed = 0;
    for c in &checks {
        let o = c.run(args.seed);
        let tag = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{tag} {} {}", c.name, o.detail);
        if o.passed {
            passed += 1;
        } else if first_failure.is_none() {
            first_failure = Some(c.name);
        }
    }
    let _ = writeln!(
        text,
        "{passed}/{} invariants passed (seed {})",
        checks.len(),
        args.seed
    );
    emit(args.out.as_deref(), &text)?;
    match first_failure {
        None => Ok(EXIT_PASS),
        Some(name) => {
            eprintln!("first failing invariant: {name}");
            Ok(EXIT_FAIL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::NormTooLarge { norm: 2.0 }),
            EXIT_PRECONDITION
        );
        assert_eq!(
            exit_code(&Error::NullImage { norm: 0.0 }),
            EXIT_PRECONDITION
        );
        assert_eq!(
            exit_code(&Error::InfeasibleTarget {
                what: "M",
                required: 1e6,
                cap: 1 << 16
            }),
            EXIT_PRECONDITION
        );
    }

    #[test]
    fn csv_float_has_seventeen_digits() {
        assert_eq!(csv_float(0.1), "1.0000000000000001e-1");
        assert_eq!(csv_float(0.25).split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn plan_mixing_rules() {
        let base = ExperimentConfig {
            matrix_path: "a".into(),
            rhs_path: None,
            function: FunctionName::Exp,
            radius: Some(2.0),
            pole: None,
            coeffs_path: None,
            beta: None,
            epsilon: Some(0.1),
            nodes: Some(8),
            order: None,
            hhl_error: None,
            seed: 0,
            normalize: false,
            out: None,
            epsilon_list: None,
            nodes_list: None,
        };
        let fs = base.function_spec().unwrap();
        assert!(matches!(base.plan(&fs, 1.4, 0.1), Err(Error::Parse(_))));
        let partial = ExperimentConfig {
            epsilon: None,
            ..base.clone()
        };
        assert!(matches!(partial.plan(&fs, 1.4, 0.1), Err(Error::Parse(_))));
        let full = ExperimentConfig {
            order: Some(8),
            hhl_error: Some(0.0),
            ..partial
        };
        let p = full.plan(&fs, 1.4, 0.1).unwrap();
        assert_eq!((p.nodes, p.order, p.epsilon), (8, 8, None));
        assert!((base.beta_for(&fs) - 2f64.sqrt()).abs() < 1e-15);
    }
}
