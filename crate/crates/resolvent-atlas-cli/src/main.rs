//! `resolvent-atlas`: spectral bounds on resolvent norms of non-normal
//! matrices, Toeplitz norm tables, model operators, and Markov stability
//! audits, with machine-readable output.
//!
//! Exit codes: 0 on success, 2 on any input problem (unparsable files or
//! literals, invalid parameters), 3 when a promised bound is violated or a
//! verification criterion fails. Errors and violations print as one JSON
//! object per line on stderr.
//!
//! All randomized subcommands draw their samples from the seed in
//! `RESOLVENT_ATLAS_SEED` (default 0); identical invocations with the same
//! seed produce byte-identical output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use resolvent_atlas::blaschke::{combi1_sides, combi2_sides, Combi2Part};
use resolvent_atlas::bounds::{bound_report, BoundReport, GridOutcome};
use resolvent_atlas::io;
use resolvent_atlas::linalg::{self, NormKind};
use resolvent_atlas::markov::{
    self, validate_stochastic, KappaClBounds, KappaQuBounds, QuantumChannelModel,
};
use resolvent_atlas::matrix::ComplexMatrix;
use resolvent_atlas::model::{extremal_contraction, model_operator_matrix, model_resolvent_matrix};
use resolvent_atlas::sampling;
use resolvent_atlas::toeplitz::{solve_theta_star, toeplitz_matrix, toeplitz_norm, ToeplitzSpec};
use resolvent_atlas::verify;
use resolvent_atlas::{Error, Result};

const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

/// Identity suites reject relative gaps above this.
const IDENTITY_TOL: f64 = 1e-10;
/// Closed-form and SVD Toeplitz norms must agree this tightly.
const TOEPLITZ_ORACLE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "resolvent-atlas",
    version,
    about = "Sharp spectral bounds on resolvent norms of non-normal matrices",
    after_help = "Matrix files are JSON objects {\"rows\", \"cols\", \"entries\": [[re, im], ...]} \
                  in row-major order; files ending in .csv are instead read as real CSV matrices. \
                  Complex literals look like 0.5, -0.2i, or 0.3+0.2i. \
                  RESOLVENT_ATLAS_SEED (default 0) seeds every randomized subcommand."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate resolvent-norm bounds over a grid of points
    Bound(BoundArgs),
    /// Tabulate closed-form Toeplitz norms against the SVD oracle
    Toeplitz(ToeplitzArgs),
    /// Emit a model operator, its resolvent, or an extremal contraction
    Model(ModelArgs),
    /// Run the seeded residue-identity property suites
    IdentityCheck(IdentityCheckArgs),
    /// Audit a stochastic chain or quantum channel for stationary-state sensitivity
    Markov(MarkovArgs),
    /// Run the built-in verification criteria
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("operator").required(true)))]
#[command(group(ArgGroup::new("point").required(true)))]
struct BoundArgs {
    /// Operator as a matrix file (JSON, or real CSV for .csv paths)
    #[arg(long, value_name = "FILE", group = "operator")]
    matrix: Option<PathBuf>,
    /// Operator given by its eigenvalues, e.g. "0.5,0.3+0.2i"
    #[arg(long, value_name = "LIST", group = "operator")]
    spectrum: Option<String>,
    /// Evaluation grid: circle:R:N, segment:Z1:Z2:N, or list:z1,z2,...
    #[arg(long, value_name = "SPEC", group = "point")]
    grid: Option<String>,
    /// Single evaluation point (same as --grid list:Z)
    #[arg(long, value_name = "COMPLEX", group = "point")]
    zeta: Option<String>,
    /// Operator class: "contraction", or "power:C" for a power bound C
    #[arg(long, default_value = "contraction")]
    assume: String,
    /// Relative tolerance for flagging the optimal bound as attained
    #[arg(long, default_value_t = 1e-3)]
    equality_tol: f64,
    /// Output format for the per-point records
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ToeplitzArgs {
    /// Smallest matrix size (inclusive)
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    /// Largest matrix size (inclusive)
    #[arg(long)]
    n_max: usize,
    /// Comma-separated off-diagonal weights, each in [0, 2]
    #[arg(long, default_value = "2")]
    beta: String,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true)))]
struct ModelArgs {
    /// Eigenvalues of the model operator, e.g. "0.5,0.3+0.2i"
    #[arg(long, value_name = "LIST", group = "source")]
    spectrum: Option<String>,
    /// Emit the closed-form resolvent at this point instead of the operator
    #[arg(long, value_name = "COMPLEX", requires = "spectrum")]
    zeta: Option<String>,
    /// Extremal contraction N:A (size and repeated eigenvalue), e.g. 4:0.9
    #[arg(long, value_name = "N:A", group = "source", conflicts_with = "zeta")]
    extremal: Option<String>,
}

#[derive(Args)]
struct IdentityCheckArgs {
    /// Seeded instances per identity suite
    #[arg(long, default_value_t = 100)]
    instances: usize,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true)))]
struct MarkovArgs {
    /// Column-stochastic transition matrix file (JSON, or real CSV for .csv paths)
    #[arg(long, value_name = "FILE", group = "target")]
    chain: Option<PathBuf>,
    /// Quantum channel as an n^2 x n^2 column-stacked superoperator file
    #[arg(long, value_name = "FILE", group = "target")]
    quantum: Option<PathBuf>,
    /// Monte-Carlo samples for the quantum lower witness (0 disables it)
    #[arg(long, default_value_t = 0, requires = "quantum")]
    samples: usize,
}

#[derive(Args)]
struct VerifyArgs {}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum CmdStatus {
    Clean,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(CmdStatus::Clean) => ExitCode::SUCCESS,
        Ok(CmdStatus::Violation) => ExitCode::from(EXIT_VIOLATION),
        Err(error) => {
            eprintln!("{}", serde_json::json!({ "error": error.to_string() }));
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(command: Command) -> Result<CmdStatus> {
    match command {
        Command::Bound(args) => cmd_bound(args),
        Command::Toeplitz(args) => cmd_toeplitz(args),
        Command::Model(args) => cmd_model(args),
        Command::IdentityCheck(args) => cmd_identity_check(args),
        Command::Markov(args) => cmd_markov(args),
        Command::Verify(_) => cmd_verify(),
    }
}

fn env_seed() -> Result<u64> {
    match std::env::var("RESOLVENT_ATLAS_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::invalid(
                "RESOLVENT_ATLAS_SEED",
                format!("expected an unsigned 64-bit integer, got {text:?}"),
            )
        }),
        Err(_) => Ok(0),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid("file", format!("cannot read {}: {e}", path.display())))
}

/// Loads a matrix file, dispatching on the extension: `.csv` means a real
/// CSV matrix, anything else the JSON format.
fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = read_file(path)?;
    if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("csv")) {
        io::parse_matrix_csv(&text)
    } else {
        io::parse_matrix_json(&text)
    }
}

fn parse_assume(text: &str) -> Result<f64> {
    if text == "contraction" {
        return Ok(1.0);
    }
    if let Some(tail) = text.strip_prefix("power:") {
        let c: f64 = tail.trim().parse().map_err(|_| {
            Error::invalid("assume", format!("bad power-bound constant {tail:?}"))
        })?;
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::invalid(
                "assume",
                "the power-bound constant must be positive and finite",
            ));
        }
        return Ok(c);
    }
    Err(Error::invalid(
        "assume",
        format!("expected \"contraction\" or \"power:C\", got {text:?}"),
    ))
}

/// One output record per grid point. Fields are null when the quantity is
/// undefined at that point (e.g. no actual norm without a matrix input, no
/// corollary bound outside the closed disk); `skipped` carries the reason
/// when the point could not be evaluated at all.
#[derive(Serialize)]
struct PointRecord {
    zeta: Complex64,
    optimal_contraction_bound: Option<f64>,
    corollary_bound: Option<f64>,
    beta_refined_bound: Option<f64>,
    power_bounded_bound: Option<f64>,
    unit_circle_bound: Option<f64>,
    actual_norm: Option<f64>,
    optimal_attained: Option<bool>,
    violations: Vec<String>,
    skipped: Option<String>,
}

impl PointRecord {
    fn from_outcome(outcome: &GridOutcome, equality_tol: f64) -> Self {
        match outcome {
            GridOutcome::Report(report) => {
                let BoundReport {
                    zeta,
                    optimal_contraction_bound,
                    corollary_bound,
                    beta_refined_bound,
                    power_bounded_bound,
                    unit_circle_bound,
                    actual_norm,
                    violations,
                } = report;
                let attained = actual_norm.map(|actual| {
                    (actual - optimal_contraction_bound).abs()
                        <= equality_tol * optimal_contraction_bound.max(f64::MIN_POSITIVE)
                });
                PointRecord {
                    zeta: *zeta,
                    optimal_contraction_bound: Some(*optimal_contraction_bound),
                    corollary_bound: *corollary_bound,
                    beta_refined_bound: *beta_refined_bound,
                    power_bounded_bound: Some(*power_bounded_bound),
                    unit_circle_bound: *unit_circle_bound,
                    actual_norm: *actual_norm,
                    optimal_attained: attained,
                    violations: violations.clone(),
                    skipped: None,
                }
            }
            GridOutcome::Skipped { zeta, reason } => PointRecord {
                zeta: *zeta,
                optimal_contraction_bound: None,
                corollary_bound: None,
                beta_refined_bound: None,
                power_bounded_bound: None,
                unit_circle_bound: None,
                actual_norm: None,
                optimal_attained: None,
                violations: Vec::new(),
                skipped: Some(reason.clone()),
            },
        }
    }
}

fn csv_quote(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}

fn csv_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_bound(args: BoundArgs) -> Result<CmdStatus> {
    let constant = parse_assume(&args.assume)?;
    if !args.equality_tol.is_finite() || args.equality_tol <= 0.0 {
        return Err(Error::invalid(
            "equality-tol",
            "the equality tolerance must be positive and finite",
        ));
    }
    let grid: Vec<Complex64> = match (&args.grid, &args.zeta) {
        (Some(spec), None) => io::parse_grid(spec)?.points(),
        (None, Some(literal)) => vec![io::parse_complex(literal)?],
        _ => unreachable!("clap enforces exactly one of --grid/--zeta"),
    };
    let matrix = args.matrix.as_deref().map(load_matrix).transpose()?;
    let spectrum = args
        .spectrum
        .as_deref()
        .map(io::parse_spectrum)
        .transpose()?;
    let outcomes = bound_report(matrix.as_ref(), spectrum.as_ref(), &grid, constant)?;

    let records: Vec<PointRecord> = outcomes
        .iter()
        .map(|outcome| PointRecord::from_outcome(outcome, args.equality_tol))
        .collect();
    match args.format {
        Format::Json => {
            for record in &records {
                println!(
                    "{}",
                    serde_json::to_string(record).expect("plain record serializes")
                );
            }
        }
        Format::Csv => {
            println!(
                "zeta_re,zeta_im,optimal,corollary,beta_refined,power_bounded,unit_circle,\
                 actual,optimal_attained,violations,skipped"
            );
            for r in &records {
                println!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.zeta.re,
                    r.zeta.im,
                    csv_opt(r.optimal_contraction_bound),
                    csv_opt(r.corollary_bound),
                    csv_opt(r.beta_refined_bound),
                    csv_opt(r.power_bounded_bound),
                    csv_opt(r.unit_circle_bound),
                    csv_opt(r.actual_norm),
                    r.optimal_attained
                        .map(|b| b.to_string())
                        .unwrap_or_default(),
                    csv_quote(&r.violations.join("; ")),
                    csv_quote(r.skipped.as_deref().unwrap_or("")),
                );
            }
        }
    }

    let mut violation = false;
    for record in &records {
        if !record.violations.is_empty() {
            violation = true;
            eprintln!(
                "{}",
                serde_json::json!({
                    "violation": { "zeta": [record.zeta.re, record.zeta.im],
                                   "messages": record.violations }
                })
            );
        }
    }
    Ok(if violation {
        CmdStatus::Violation
    } else {
        CmdStatus::Clean
    })
}

fn cmd_toeplitz(args: ToeplitzArgs) -> Result<CmdStatus> {
    if args.n_min == 0 {
        return Err(Error::invalid("n-min", "sizes start at 1"));
    }
    if args.n_min > args.n_max {
        return Err(Error::invalid(
            "n-max",
            format!("range {}..{} is empty", args.n_min, args.n_max),
        ));
    }
    let betas: Vec<f64> = args
        .beta
        .split(',')
        .map(|field| {
            field
                .trim()
                .parse()
                .map_err(|_| Error::invalid("beta", format!("bad value {:?}", field.trim())))
        })
        .collect::<Result<_>>()?;

    println!("n,beta,theta_star,norm_closed,norm_svd,delta");
    let mut violation = false;
    for n in args.n_min..=args.n_max {
        for &beta in &betas {
            let closed = toeplitz_norm(n, beta)?;
            let spec = ToeplitzSpec::new(n, beta)?;
            let svd = linalg::spectral_norm(&toeplitz_matrix(&spec))?;
            let delta = closed - svd;
            let theta = solve_theta_star(n, beta)
                .map(|t| t.to_string())
                .unwrap_or_default();
            println!("{n},{beta},{theta},{closed},{svd},{delta}");
            if delta.abs() > TOEPLITZ_ORACLE_TOL {
                violation = true;
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "violation": { "n": n, "beta": beta, "delta": delta,
                                       "tolerance": TOEPLITZ_ORACLE_TOL }
                    })
                );
            }
        }
    }
    Ok(if violation {
        CmdStatus::Violation
    } else {
        CmdStatus::Clean
    })
}

fn cmd_model(args: ModelArgs) -> Result<CmdStatus> {
    let matrix = match (&args.spectrum, &args.extremal) {
        (Some(literal), None) => {
            let spectrum = io::parse_spectrum(literal)?;
            match &args.zeta {
                Some(z) => model_resolvent_matrix(&spectrum, io::parse_complex(z)?)?,
                None => model_operator_matrix(&spectrum).into_matrix(),
            }
        }
        (None, Some(spec)) => {
            let (n_text, a_text) = spec.split_once(':').ok_or_else(|| {
                Error::invalid("extremal", format!("expected N:A, got {spec:?}"))
            })?;
            let n: usize = n_text.trim().parse().map_err(|_| {
                Error::invalid("extremal", format!("bad size {:?}", n_text.trim()))
            })?;
            let a: f64 = a_text.trim().parse().map_err(|_| {
                Error::invalid("extremal", format!("bad eigenvalue {:?}", a_text.trim()))
            })?;
            extremal_contraction(n, a)?
        }
        _ => unreachable!("clap enforces exactly one of --spectrum/--extremal"),
    };
    println!("{}", io::write_matrix_json(&matrix));
    Ok(CmdStatus::Clean)
}

fn cmd_identity_check(args: IdentityCheckArgs) -> Result<CmdStatus> {
    let seed = env_seed()?;
    let mut rng = sampling::rng_from_seed(seed);
    let rel = |lhs: Complex64, rhs: Complex64| {
        (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE)
    };
    let mut violation = false;
    let mut breach = |suite: &str, detail: String| {
        violation = true;
        eprintln!(
            "{}",
            serde_json::json!({ "violation": { "suite": suite, "detail": detail } })
        );
    };

    let mut worst = 0.0_f64;
    for _ in 0..args.instances {
        let m = rng.random_range(2..=8);
        let s = sampling::random_spectrum(&mut rng, m, 0.9, 0.15);
        let zeta = sampling::unit_circle_point(&mut rng);
        let j = rng.random_range(1..m);
        let i = rng.random_range(j + 1..=m);
        let (lhs, rhs) = combi1_sides(&s, zeta, j, i)?;
        let gap = rel(lhs, rhs);
        if gap > IDENTITY_TOL {
            breach(
                "combi1",
                format!("window [{j},{i}] of degree {m}: relative gap {gap:e}"),
            );
        }
        worst = worst.max(gap);
    }
    println!(
        "combi1: {} instances, max relative gap {:e} (tolerance {IDENTITY_TOL:e})",
        args.instances, worst
    );

    let mut worst_one = 0.0_f64;
    let mut worst_two = 0.0_f64;
    for _ in 0..args.instances {
        let m = rng.random_range(1..=8);
        let s = sampling::random_spectrum(&mut rng, m, 0.9, 0.15);
        let zeta = sampling::unit_circle_point(&mut rng);
        let r = rng.random_range(0.5..0.95);
        let l = rng.random_range(1..=m);
        let (lhs, rhs) = combi2_sides(&s, zeta, r, Combi2Part::One { l })?;
        let gap = rel(lhs, rhs);
        if gap > IDENTITY_TOL {
            breach(
                "combi2 part 1",
                format!("degree {m}, pinned node {l}, r {r}: relative gap {gap:e}"),
            );
        }
        worst_one = worst_one.max(gap);
        let (lhs, rhs) = combi2_sides(&s, zeta, r, Combi2Part::Two)?;
        let gap = rel(lhs, rhs);
        if gap > IDENTITY_TOL {
            breach(
                "combi2 part 2",
                format!("degree {m}, r {r}: relative gap {gap:e}"),
            );
        }
        worst_two = worst_two.max(gap);
    }
    println!(
        "combi2 part 1: {} instances, max relative gap {:e} (tolerance {IDENTITY_TOL:e})",
        args.instances, worst_one
    );
    println!(
        "combi2 part 2: {} instances, max relative gap {:e} (tolerance {IDENTITY_TOL:e})",
        args.instances, worst_two
    );

    Ok(if violation {
        CmdStatus::Violation
    } else {
        CmdStatus::Clean
    })
}

#[derive(Serialize)]
struct ClassicalAudit {
    kind: &'static str,
    dimension: usize,
    stationary: Vec<Complex64>,
    sub_spectrum: Vec<Complex64>,
    kappa_exact: Option<f64>,
    #[serde(flatten)]
    bounds: KappaClBounds,
    projection_residual: f64,
    fundamental_residual: f64,
    power_sup_norm_100: f64,
}

#[derive(Serialize)]
struct QuantumAudit {
    kind: &'static str,
    dimension: usize,
    liouville_dimension: usize,
    #[serde(flatten)]
    bounds: KappaQuBounds,
    mc_lower_witness: Option<f64>,
    samples: usize,
    seed: u64,
}

fn cmd_markov(args: MarkovArgs) -> Result<CmdStatus> {
    match (&args.chain, &args.quantum) {
        (Some(path), None) => {
            let mut model = validate_stochastic(load_matrix(path)?)?;
            let projection = markov::stationary_projection(&mut model)?;
            let fundamental = markov::fundamental_inverse(&mut model)?;
            let bounds = markov::kappa_cl_bounds(&mut model)?;
            let kappa_exact = match markov::kappa_cl_exact(&mut model) {
                Ok(kappa) => Some(kappa),
                Err(Error::DimensionCap { .. }) => None,
                Err(other) => return Err(other),
            };
            let t = model.transition();
            let projection_residual = projection
                .mul(&projection)
                .sub(&projection)
                .max_abs()
                .max(t.mul(&projection).sub(&projection).max_abs())
                .max(projection.mul(t).sub(&projection).max_abs());
            let n = model.dimension();
            let regularized = ComplexMatrix::identity(n).sub(t).add(&projection);
            let fundamental_residual = fundamental
                .mul(&regularized)
                .sub(&ComplexMatrix::identity(n))
                .max_abs();
            let power_sup_norm_100 =
                linalg::power_sup_norm(&t.sub(&projection), NormKind::OneToOne, 100)?;
            let audit = ClassicalAudit {
                kind: "classical",
                dimension: n,
                stationary: projection.column(0),
                sub_spectrum: model
                    .cached_sub_spectrum()
                    .expect("bounds computation caches the difference spectrum")
                    .to_vec(),
                kappa_exact,
                bounds,
                projection_residual,
                fundamental_residual,
                power_sup_norm_100,
            };
            println!(
                "{}",
                serde_json::to_string(&audit).expect("plain record serializes")
            );
            Ok(CmdStatus::Clean)
        }
        (None, Some(path)) => {
            let seed = env_seed()?;
            let channel = QuantumChannelModel::new(load_matrix(path)?)?;
            let bounds = markov::kappa_qu_bounds(&channel)?;
            let mc_lower_witness = if args.samples > 0 {
                Some(markov::kappa_qu_monte_carlo_lower(
                    &channel,
                    args.samples,
                    seed,
                )?)
            } else {
                None
            };
            let audit = QuantumAudit {
                kind: "quantum",
                dimension: channel.dimension(),
                liouville_dimension: channel.dimension() * channel.dimension(),
                bounds,
                mc_lower_witness,
                samples: args.samples,
                seed,
            };
            println!(
                "{}",
                serde_json::to_string(&audit).expect("plain record serializes")
            );
            Ok(CmdStatus::Clean)
        }
        _ => unreachable!("clap enforces exactly one of --chain/--quantum"),
    }
}

fn cmd_verify() -> Result<CmdStatus> {
    let seed = env_seed()?;
    let outcomes = verify::run_all(seed);
    let mut all_passed = true;
    for outcome in &outcomes {
        println!("{}", outcome.summary_line());
        all_passed &= outcome.passed;
    }
    Ok(if all_passed {
        CmdStatus::Clean
    } else {
        CmdStatus::Violation
    })
}
