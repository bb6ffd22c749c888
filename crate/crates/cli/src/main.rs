//! sphcs: deterministic command line front end for the sphere coherent
//! state numerics. Every subcommand emits a CSV or JSON table with the
//! settings echoed as metadata; identical inputs produce byte-identical
//! output, so the artifacts serve directly as plot inputs and regression
//! baselines.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numeric failure
//! (a certified bound or series could not reach its tolerance).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Core(sphcs_core::Error),
    Usage(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_domain() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) | CliError::Io(s) => write!(f, "{s}"),
        }
    }
}

impl From<sphcs_core::Error> for CliError {
    fn from(e: sphcs_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Output routing shared by every subcommand.
#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; the default is csv except for operator-check (json).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this path instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Parser)]
#[command(
    name = "sphcs",
    version,
    about = "Sphere coherent state numerics: kernels, limit studies, operator checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the odd-sphere heat kernel at a complex angle.
    Kernel(commands::KernelArgs),
    /// Sweep the radius and tabulate the distance to the flat Gaussian limit.
    LimitStudy(StudyCmdArgs),
    /// Tabulate the exponentially small non-central lattice remainder over a τ list.
    RemainderStudy(commands::RemainderArgs),
    /// Compare the rescaled central Gaussian against its τ → 0 Jacobian limit.
    RatioStudy(commands::RatioArgs),
    /// Measure coherent state widths on a position grid.
    WidthStudy(StudyCmdArgs),
    /// Check annihilation operator identities in a truncated circle basis.
    OperatorCheck(commands::OperatorArgs),
}

#[derive(Debug, Args)]
struct StudyCmdArgs {
    #[command(flatten)]
    flags: config::StudyFlags,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    // format/out priority: flag, then config file entry, then command default
    let (table, format, out) = match &cli.command {
        Command::Kernel(args) => {
            (commands::kernel(args)?, args.out.format.unwrap_or(Format::Csv), args.out.out.clone())
        }
        Command::LimitStudy(args) => {
            let cfg = config::resolve(&args.flags)?;
            let format = args.out.format.or(cfg.format).unwrap_or(Format::Csv);
            let out = args.out.out.clone().or_else(|| cfg.out.clone());
            (commands::limit_study(&cfg)?, format, out)
        }
        Command::RemainderStudy(args) => (
            commands::remainder_study(args)?,
            args.out.format.unwrap_or(Format::Csv),
            args.out.out.clone(),
        ),
        Command::RatioStudy(args) => (
            commands::ratio_study(args)?,
            args.out.format.unwrap_or(Format::Csv),
            args.out.out.clone(),
        ),
        Command::WidthStudy(args) => {
            let cfg = config::resolve(&args.flags)?;
            let format = args.out.format.or(cfg.format).unwrap_or(Format::Csv);
            let out = args.out.out.clone().or_else(|| cfg.out.clone());
            (commands::width_study(&cfg)?, format, out)
        }
        Command::OperatorCheck(args) => (
            commands::operator_check(args)?,
            args.out.format.unwrap_or(Format::Json),
            args.out.out.clone(),
        ),
    };
    table.write(format, out.as_deref())
}

/// SPHCS_THREADS caps the rayon pool; unset leaves the library default.
/// Results never depend on the thread count, only wall time does.
fn init_thread_pool() -> Result<(), CliError> {
    let value = match std::env::var("SPHCS_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(CliError::Usage(format!("SPHCS_THREADS: {e}"))),
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        CliError::Usage(format!("SPHCS_THREADS must be a positive integer, got {value:?}"))
    })?;
    if threads == 0 {
        return Err(CliError::Usage(format!(
            "SPHCS_THREADS must be a positive integer, got {value:?}"
        )));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}
