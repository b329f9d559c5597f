use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_pick::extremal::{build_extremal_with, SolverOptions};
use harmonic_pick::oracle::{claim_checks, run_trials};
use harmonic_pick::poisson::classical_schwarz_bound;
use harmonic_pick::region::{
    build_region_with, rotated_contains, Placement, DEFAULT_BETA_SAMPLES, DEFAULT_CONTAINMENT_TOL,
};
use harmonic_pick::zonal::DEFAULT_ORDER;
use harmonic_pick_cli::{
    exit_code, extremal_table, RegionDocument, VerifyReport, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE,
};
use num_complex::Complex64;

/// Sharp value regions of bounded complex-valued harmonic functions on the unit ball.
#[derive(Parser)]
#[command(name = "harmonic-pick", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the value region for a given |F(0)| and write it as JSON, CSV or SVG.
    Region(RegionArgs),
    /// Tabulate the extremal boundary profile for moments (a, b).
    Extremal(ExtremalArgs),
    /// Print the classical bound sup |F(x)| over |x| = r for ρ = 0.
    Bound(BoundArgs),
    /// Classify a value w against the region for F(0) = f0.
    Check(CheckArgs),
    /// Run random containment trials and structural checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RegionArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_BETA_SAMPLES)]
    beta_samples: usize,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    quad_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ExtremalArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    quad_order: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BoundArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    r: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct CheckArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0.0)]
    f0_re: f64,
    #[arg(long, default_value_t = 0.0)]
    f0_im: f64,
    #[arg(long)]
    w_re: f64,
    #[arg(long)]
    w_im: f64,
    #[arg(long, default_value_t = DEFAULT_CONTAINMENT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_BETA_SAMPLES)]
    beta_samples: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sphere points per trial.
    #[arg(long, default_value_t = 64)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_CONTAINMENT_TOL)]
    tol: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(harmonic_pick::Error),
    Io(std::io::Error),
}

impl From<harmonic_pick::Error> for Failure {
    fn from(e: harmonic_pick::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn region(args: RegionArgs) -> Result<u8, Failure> {
    if !args.alpha.is_finite() {
        return Err(Failure::Usage("alpha must be finite".into()));
    }
    let options = SolverOptions {
        order: args.quad_order,
        ..SolverOptions::default()
    };
    let region = build_region_with(args.n, args.r, args.rho, args.beta_samples, &options)?;
    let document = RegionDocument::new(&region, args.alpha, args.quad_order);
    let text = match args.format {
        Format::Json => document.to_json(),
        Format::Csv => document.to_csv(),
        Format::Svg => document.to_svg(),
    };
    emit(&args.out, &text)?;
    Ok(EXIT_OK)
}

fn extremal(args: ExtremalArgs) -> Result<u8, Failure> {
    if args.samples < 2 {
        return Err(Failure::Usage("need at least two samples".into()));
    }
    let options = SolverOptions {
        order: args.quad_order,
        ..SolverOptions::default()
    };
    let profile = build_extremal_with(args.n, args.r, args.a, args.b, None, &options)?;
    emit(&args.out, &extremal_table(&profile, args.samples))?;
    Ok(EXIT_OK)
}

fn bound(args: BoundArgs) -> Result<u8, Failure> {
    println!("{:.6}", classical_schwarz_bound(args.n, args.r)?);
    Ok(EXIT_OK)
}

fn check(args: CheckArgs) -> Result<u8, Failure> {
    let f0 = Complex64::new(args.f0_re, args.f0_im);
    let w = Complex64::new(args.w_re, args.w_im);
    let result = rotated_contains(args.n, args.r, f0, w, args.tol, args.beta_samples)?;
    let label = match result.placement {
        Placement::Inside => "inside",
        Placement::Boundary => "boundary",
        Placement::Outside => "outside",
    };
    println!("{label} margin={:.6e}", result.margin);
    Ok(if result.placement == Placement::Outside {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let trials = run_trials(
        args.n,
        args.r,
        args.trials,
        args.seed,
        args.points,
        args.tol,
    )?;
    let claims = claim_checks(args.n, args.r)?;
    let report = VerifyReport { trials, claims };
    for c in &report.claims {
        println!(
            "{} {} worst={:.6e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.worst
        );
    }
    println!(
        "trials={} failures={} worst_margin={:.6e}",
        report.trials.trials,
        report.trials.failures.len(),
        report.trials.worst_margin
    );
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json())?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Region(args) => region(args),
        Command::Extremal(args) => extremal(args),
        Command::Bound(args) => bound(args),
        Command::Check(args) => check(args),
        Command::Verify(args) => verify(args),
    };
    let code = match result {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}
