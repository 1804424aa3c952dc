//! liplab: metric measure spaces, pointwise Lipschitz constants, length
//! metrics, and singular-set perturbation from the command line.
//!
//! Exit codes, fixed so shell harnesses need no JSON parsing:
//!   0  success, every checked flag true
//!   2  invalid flags or parameter values
//!   3  I/O or parse failure
//!   4  field ids do not match the space
//!   5  a verification flag came back false (or validate found a
//!      broken metric)
//!   6  threshold too coarse: the achievable lambda is not above 2 tau
//!   7  space rejected: not quasi-convex (disconnected)

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liplab_core::io::{self, fmt_f64, PerturbReportFile};
use liplab_core::{
    analyze, gen_grid, gen_path, gen_random_geometric, gen_sierpinski, length_distance,
    length_distance_floyd_warshall, lip_field, perturb, residual_demo, snowflake, verify_at, Error,
    MetricSpace, PerturbParams, ScalarField, Scale,
};

#[derive(Parser)]
#[command(
    name = "liplab",
    version,
    about = "Lipschitz analysis and singular-set perturbation on finite metric measure spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a space file.
    Gen(GenArgs),
    /// Check the metric axioms and quasi-convexity of a space.
    Validate(ValidateArgs),
    /// Compute the length-metric matrix d_L.
    Lengthmetric(LengthArgs),
    /// Compute the pointwise Lipschitz profile of a field.
    Lip(LipArgs),
    /// Perturb a field to shrink its singular set.
    Perturb(PerturbArgs),
    /// Re-verify a perturbation from its report file.
    Verify(VerifyArgs),
    /// Sweep perturbations with halving budgets (r_k = 2^-k).
    Demo(DemoArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Kind {
    Path,
    Grid,
    RandomGeometric,
    Sierpinski,
    Snowflake,
}

#[derive(Args)]
struct GenArgs {
    /// Space family to generate.
    #[arg(long, value_enum)]
    kind: Kind,
    /// Point count (path, random-geometric).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Connection radius (random-geometric).
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subdivision depth (sierpinski).
    #[arg(long)]
    level: Option<u32>,
    /// Snowflake exponent in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Base space file to snowflake.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    space: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Algorithm {
    Dijkstra,
    FloydWarshall,
}

#[derive(Args)]
struct LengthArgs {
    space: PathBuf,
    /// Shortest-path route; both produce the same matrix.
    #[arg(long, value_enum, default_value_t = Algorithm::Dijkstra)]
    algorithm: Algorithm,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LipArgs {
    space: PathBuf,
    field: PathBuf,
    /// Ball radius h for the pointwise constant.
    #[arg(long)]
    scale: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PerturbArgs {
    space: PathBuf,
    field: PathBuf,
    /// Norm budget: the result stays within delta of f.
    #[arg(long)]
    delta: f64,
    /// Measure budget: the singular set of g must weigh less than r.
    #[arg(long)]
    r: f64,
    /// Singularity threshold tau.
    #[arg(long)]
    tau: f64,
    /// Ball radius h.
    #[arg(long)]
    scale: f64,
    /// Override the automatic atom-free radius selection.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Where to write the perturbed field CSV.
    #[arg(long)]
    out_field: Option<PathBuf>,
    /// Where to write the report JSON; stdout when absent.
    #[arg(long)]
    out_report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    space: PathBuf,
    field: PathBuf,
    perturbed: PathBuf,
    report: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    space: PathBuf,
    field: PathBuf,
    /// Number of halving steps k = 1..=steps.
    #[arg(long)]
    steps: u32,
    /// Base norm budget; step k uses delta * 2^-k.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Ball radius h.
    #[arg(long)]
    scale: f64,
}

/// Errors carrying their exit code; core errors map via `exit_code`.
enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IdMismatch(_) => 4,
        Error::ThresholdTooCoarse { .. } => 6,
        Error::NotQuasiConvex { .. } => 7,
        Error::BadParam { .. }
        | Error::BadScale(_)
        | Error::BadSchedule
        | Error::BadGenSize { .. } => 2,
        // Everything else arises from file content or the filesystem.
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        return fail(f);
    }
    let run = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Lengthmetric(args) => cmd_lengthmetric(args),
        Command::Lip(args) => cmd_lip(args),
        Command::Perturb(args) => cmd_perturb(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Demo(args) => cmd_demo(args),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Core(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Failure::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// LIPLAB_THREADS caps the global rayon pool. Unset means the rayon
/// default; results are identical either way.
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("LIPLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().ok().filter(|&k| k >= 1).ok_or_else(|| {
        Failure::Usage(format!(
            "LIPLAB_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

/// Writes to the path when given, otherwise to stdout (with a trailing
/// newline unless the payload already ends in one).
fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => io::write_atomic(path, contents)?,
        None if contents.ends_with('\n') => print!("{contents}"),
        None => println!("{contents}"),
    }
    Ok(())
}

fn require<T>(opt: Option<T>, name: &str, kind: &str) -> Result<T, Failure> {
    opt.ok_or_else(|| Failure::Usage(format!("--{name} is required for --kind {kind}")))
}

fn load_space(path: &Path) -> Result<MetricSpace, Failure> {
    Ok(io::read_space(path)?)
}

fn load_field(path: &Path, space: &MetricSpace) -> Result<ScalarField, Failure> {
    Ok(io::read_field(path, space.n())?)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Failure> {
    let space = match args.kind {
        Kind::Path => gen_path(require(args.n, "n", "path")?)?,
        Kind::Grid => gen_grid(
            require(args.rows, "rows", "grid")?,
            require(args.cols, "cols", "grid")?,
        )?,
        Kind::RandomGeometric => gen_random_geometric(
            require(args.n, "n", "random-geometric")?,
            require(args.radius, "radius", "random-geometric")?,
            args.seed,
        )?,
        Kind::Sierpinski => gen_sierpinski(require(args.level, "level", "sierpinski")?)?,
        Kind::Snowflake => {
            let base = require(args.base.as_deref(), "base", "snowflake")?;
            let alpha = require(args.alpha, "alpha", "snowflake")?;
            snowflake(&load_space(base)?, alpha)?
        }
    };
    emit(args.out.as_deref(), &io::space_to_json(&space)?)?;
    Ok(0)
}

fn cmd_validate(args: ValidateArgs) -> Result<u8, Failure> {
    let space = load_space(&args.space)?;
    let report = analyze(&space);
    emit(args.out.as_deref(), &io::space_report_to_json(&report)?)?;
    Ok(if report.metric_ok { 0 } else { 5 })
}

fn cmd_lengthmetric(args: LengthArgs) -> Result<u8, Failure> {
    let space = load_space(&args.space)?;
    let d_l = match args.algorithm {
        Algorithm::Dijkstra => length_distance(&space),
        Algorithm::FloydWarshall => length_distance_floyd_warshall(&space),
    };
    emit(args.out.as_deref(), &io::matrix_to_csv(&d_l))?;
    Ok(0)
}

fn cmd_lip(args: LipArgs) -> Result<u8, Failure> {
    let space = load_space(&args.space)?;
    let field = load_field(&args.field, &space)?;
    let profile = lip_field(&space, &field, Scale::new(args.scale)?);
    emit(args.out.as_deref(), &io::profile_to_json(&profile)?)?;
    Ok(0)
}

fn cmd_perturb(args: PerturbArgs) -> Result<u8, Failure> {
    let space = load_space(&args.space)?;
    let field = load_field(&args.field, &space)?;
    let mut params = PerturbParams::new(args.delta, args.r, args.tau, Scale::new(args.scale)?)?;
    if let Some(eps) = args.epsilon {
        params = params.with_epsilon(eps)?;
    }
    let result = perturb(&space, &field, &params)?;
    if let Some(path) = &args.out_field {
        io::write_field(path, &result.g)?;
    }
    let report = PerturbReportFile::new(&params, &result);
    emit(args.out_report.as_deref(), &io::report_to_json(&report)?)?;
    Ok(if report.contract_ok() { 0 } else { 5 })
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let space = load_space(&args.space)?;
    let f = load_field(&args.field, &space)?;
    let g = load_field(&args.perturbed, &space)?;
    let stored = io::read_report(&args.report)?;
    let params = PerturbParams::new(stored.delta, stored.r, stored.tau, Scale::new(stored.h)?)?;
    let fresh = verify_at(&space, &f, &g, &params, stored.epsilon);

    // Contract fields recomputed from scratch; construction-time fields
    // (lambda, M, C, informational flags) pass through from the input.
    let mut report = stored;
    report.dinf_distance = fresh.dinf_distance;
    report.singular_measure_before = fresh.singular_measure_before;
    report.singular_measure_after = fresh.singular_measure_after;
    report.flags.norm_ok = fresh.norm_ok;
    report.flags.measure_ok = fresh.measure_ok;
    report.flags.inclusion_ok = fresh.inclusion_ok;
    report.flags.atom_free = fresh.atom_free;

    emit(args.out.as_deref(), &io::report_to_json(&report)?)?;
    Ok(if report.contract_ok() { 0 } else { 5 })
}

fn cmd_demo(args: DemoArgs) -> Result<u8, Failure> {
    let space = load_space(&args.space)?;
    let field = load_field(&args.field, &space)?;
    let h = Scale::new(args.scale)?;
    if !args.delta.is_finite() || args.delta <= 0.0 {
        return Err(Failure::Core(Error::BadParam {
            name: "delta",
            value: args.delta,
        }));
    }
    let schedule: Vec<(f64, f64)> = (1..=args.steps)
        .map(|k| {
            let half = 0.5f64.powi(k as i32);
            (args.delta * half, half)
        })
        .collect();
    let steps = residual_demo(&space, &field, args.tau, h, &schedule)?;

    let mut any_flags_failed = false;
    let mut any_coarse = false;
    let mut any_rejected = false;
    println!("k,r_k,delta_k,singular_measure,dinf_distance,status");
    for (i, step) in steps.iter().enumerate() {
        let k = i + 1;
        match &step.outcome {
            Ok(res) => {
                let ok = res.verification.all_ok();
                any_flags_failed |= !ok;
                println!(
                    "{},{},{},{},{},{}",
                    k,
                    fmt_f64(step.r),
                    fmt_f64(step.delta),
                    fmt_f64(res.verification.singular_measure_after),
                    fmt_f64(res.verification.dinf_distance),
                    if ok { "ok" } else { "flags_failed" }
                );
            }
            Err(e) => {
                let status = match e {
                    Error::ThresholdTooCoarse { .. } => {
                        any_coarse = true;
                        "threshold_too_coarse"
                    }
                    Error::NotQuasiConvex { .. } => {
                        any_rejected = true;
                        "not_quasi_convex"
                    }
                    _ => {
                        any_flags_failed = true;
                        "error"
                    }
                };
                println!(
                    "{},{},{},-,-,{}",
                    k,
                    fmt_f64(step.r),
                    fmt_f64(step.delta),
                    status
                );
            }
        }
    }
    Ok(if any_rejected {
        7
    } else if any_coarse {
        6
    } else if any_flags_failed {
        5
    } else {
        0
    })
}
