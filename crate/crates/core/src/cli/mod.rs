//! Command-line front end of the `grnewton` binary.
//!
//! Exit codes: 0 converged or all checks passed, 1 input error, 2 iteration
//! budget exhausted, 3 solver failure, degeneracy or failed check.

mod check;
mod commands;
mod matrix_file;
mod report;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use check::{format_results, run_check, CheckOptions, SuiteResult};
pub use commands::{cmd_invariant, cmd_rayleigh_gr, cmd_rayleigh_lg, exit_code, CommandOutput};
pub use matrix_file::{format_matrix, parse_matrix, read_matrix};
pub use report::{
    validate_report, without_timing, ReportConfig, ReportFinal, ReportIteration, ReportRate, RunReport, SCHEMA_VERSION,
};

use crate::grassmann::ChartId;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{origin}:{line}: {message}")]
    Parse { origin: String, line: usize, message: String },

    #[error("InputNotSymmetric: symmetry residual {residual:e} exceeds 1e-8")]
    InputNotSymmetric { residual: f64 },

    #[error("InputNotHamiltonianSymmetric: |JHJ - H| = {residual:e} exceeds 1e-8")]
    InputNotHamiltonianSymmetric { residual: f64 },

    #[error("BadRank: m = {m} is not in (0, {n})")]
    BadRank { n: usize, m: usize },

    #[error("OddDimension: the Hamiltonian matrix must have even size, got {n}")]
    OddDimension { n: usize },

    #[error("NotSquare: input is {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid report: {0}")]
    Report(String),

    #[error(transparent)]
    Core(#[from] crate::Error),
}

#[derive(Debug, Parser)]
#[command(name = "grnewton", version, about = "Newton iterations on Grassmann and Lagrange-Grassmann manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremize tr(AP) over rank-m projectors for symmetric A.
    RayleighGr(GrArgs),
    /// Extremize tr(HP) over Lagrangian projectors for Hamiltonian-symmetric H.
    RayleighLg(LgArgs),
    /// Find an m-dimensional invariant subspace of a square matrix.
    Invariant(InvariantArgs),
    /// Run the seeded geometry property suites.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Matrix file: one row per line, whitespace-separated, '#' comments.
    pub matrix: PathBuf,
    /// Chart pulling the cost back.
    #[arg(long, default_value = "exp")]
    pub mu: ChartId,
    /// Chart pushing the step forward.
    #[arg(long, default_value = "qr")]
    pub nu: ChartId,
    /// Stop when the Riemannian gradient norm falls to this.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Stop when a step norm falls to this.
    #[arg(long, default_value_t = 1e-14)]
    pub step_tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting basis (n×m, or 2n×n for rayleigh-lg); orthonormalized on load.
    #[arg(long, conflicts_with = "random_start")]
    pub start: Option<PathBuf>,
    /// Size ‖ξ‖_F of the seeded random step away from the base start.
    #[arg(long, default_value_t = 0.1)]
    pub perturb: f64,
    /// Start from a seeded random point instead of the coordinate subspace.
    #[arg(long)]
    pub random_start: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GrArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Subspace dimension.
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Clone, Args)]
pub struct LgArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Direct,
    Recursive,
}

#[derive(Debug, Clone, Args)]
pub struct InvariantArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub m: usize,
    /// How to solve the Newton matrix equation.
    #[arg(long, value_enum, default_value = "direct")]
    pub solver: SolverArg,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Comma-separated ambient dimensions.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seeds per (n, m) pair.
    #[arg(long, default_value_t = 3)]
    pub seeds: usize,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn emit(output: &CommandOutput, out: Option<&PathBuf>) -> Result<(), CliError> {
    let json = output.report.to_json();
    match out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?,
        None => println!("{json}"),
    }
    let r = &output.report;
    let last = r.iterations.last();
    eprintln!(
        "{}: {} after {} steps, grad_norm {:.3e}, rate {}",
        r.command,
        r.status,
        last.map_or(0, |i| i.iter),
        last.map_or(f64::NAN, |i| i.grad_norm),
        r.rate.verdict
    );
    if let Some(d) = &r.diagnostic {
        eprintln!("diagnostic: {d}");
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let (output, out) = match &cli.command {
        Command::RayleighGr(a) => (cmd_rayleigh_gr(a)?, a.run.out.as_ref()),
        Command::RayleighLg(a) => (cmd_rayleigh_lg(a)?, a.run.out.as_ref()),
        Command::Invariant(a) => (cmd_invariant(a)?, a.run.out.as_ref()),
        Command::Check(a) => {
            let defaults = CheckOptions::default();
            let opts = CheckOptions {
                sizes: a.sizes.clone().unwrap_or(defaults.sizes),
                seed: a.seed,
                seeds: a.seeds,
                inject_fault: a.inject_fault,
            };
            let results = run_check(&opts)?;
            print!("{}", format_results(&results));
            let _ = std::io::stdout().flush();
            return Ok(if results.iter().all(SuiteResult::passed) { EXIT_OK } else { EXIT_SOLVER });
        }
    };
    emit(&output, out)?;
    Ok(output.exit_code)
}

/// Parses arguments and runs; returns the process exit code. Usage errors
/// map to the input-error code rather than clap's default.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
