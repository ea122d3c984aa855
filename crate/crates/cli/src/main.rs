mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::RunConfig;
use crate::report::{write_atomic, write_report, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("tolerance exceeded: {0}")]
    ToleranceExceeded(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) | CliError::ToleranceExceeded(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl From<dirac_split::Error> for CliError {
    fn from(e: dirac_split::Error) -> Self {
        use dirac_split::Error::*;
        match e {
            UnknownBuiltin(_) | ArityMismatch { .. } | ExpressionParse { .. } | InvalidAxis(_) => {
                CliError::Config(e.to_string())
            }
            InvalidPotential(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "dirac-split", version, about = "Split and separate the Dirac equation in longitudinal potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the potential: structure, field strengths, commutator residual.
    Check(Flags),
    /// Lowest transverse Pauli modes; writes spectrum.csv.
    Spectrum(Flags),
    /// Split a test solution into its two subsolutions and check them.
    Split(Flags),
    /// Separated solution at h and h/2 with Dirac residuals; writes samples.csv.
    Reconstruct(Flags),
}

#[derive(clap::Args)]
struct Flags {
    #[arg(long)]
    config: PathBuf,
    /// 1 or 2 (dotted index carried by the subsolution).
    #[arg(long)]
    branch: Option<String>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Run without the validation pre-check (for negative controls).
    #[arg(long)]
    skip_check: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DIRAC_SPLIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("DIRAC_SPLIT_THREADS must be a non-negative integer, got `{raw}`")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn apply_flags(name: &str, cfg: &mut RunConfig, flags: &Flags) {
    if let Some(k) = flags.modes {
        cfg.solver.modes = k;
    }
    if let Some(out) = &flags.out {
        cfg.report.out = out.display().to_string();
    }
    if let Some(t) = flags.tolerance {
        match name {
            "check" => cfg.check.tolerance = t,
            "split" => cfg.solution.tolerance = t,
            _ => cfg.solver.tolerance = t,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (name, flags) = match &cli.command {
        Command::Check(f) => ("check", f),
        Command::Spectrum(f) => ("spectrum", f),
        Command::Split(f) => ("split", f),
        Command::Reconstruct(f) => ("reconstruct", f),
    };
    let mut cfg = RunConfig::load(&flags.config)?;
    apply_flags(name, &mut cfg, flags);
    let branch = cfg.branch(flags.branch.as_deref())?;
    let out = PathBuf::from(&cfg.report.out);
    let start = Instant::now();
    let mut report = Report::new(name, cfg.clone());
    let result = match cli.command {
        Command::Check(_) => commands::check(&cfg, &mut report),
        Command::Spectrum(_) => commands::spectrum(&cfg, branch, flags.skip_check, &mut report),
        Command::Split(_) => commands::split_cmd(&cfg, branch, flags.skip_check, &mut report),
        Command::Reconstruct(_) => commands::reconstruct_cmd(&cfg, branch, flags.skip_check, &mut report),
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    let files = match &result {
        Ok(files) => files.clone(),
        Err(e) => {
            report.status = "fail".into();
            report.exit_code = e.exit_code() as i32;
            report.message = Some(e.to_string());
            Vec::new()
        }
    };
    for (file, contents) in &files {
        write_atomic(&out, file, contents.as_bytes()).map_err(|e| CliError::Config(format!("{e:#}")))?;
    }
    write_report(&out, &report).map_err(|e| CliError::Config(format!("{e:#}")))?;
    result.map(|_| ())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirac-split: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
