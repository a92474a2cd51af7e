//! `incompat`: incompatibility order of a pair of orthonormal bases.
//!
//! Exit status: 0 success, 1 verification failure, 2 input error, 3 size cap exceeded.

mod analyze;
mod corpus;
mod curves;
mod source;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use incompat::rank::{RankConfig, DEFAULT_RANK_TOL};
use incompat::support::{SupportConfig, DEFAULT_SUPPORT_CAP, DEFAULT_ZERO_THRESHOLD};

/// Largest dimension for which the deficiency profile is attempted.
pub const DEFAULT_PROFILE_CAP: usize = 14;

#[derive(Debug, Parser)]
#[command(
    name = "incompat",
    version,
    about = "Incompatibility order of a pair of orthonormal bases"
)]
struct Cli {
    /// Worker threads for the subset searches (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deficiency profile, minimal support and cross-checks for one matrix
    Analyze(analyze::AnalyzeArgs),
    /// CSV of t, R_t, R_row_t, R_col_t
    ProfileCurve(curves::ProfileCurveArgs),
    /// CSV of the piecewise-linear bound zeta_d(x) on [1, d]
    ZetaCurve(curves::ZetaCurveArgs),
    /// Run the invariant suites over families and seeded random unitaries
    VerifyCorpus(corpus::VerifyCorpusArgs),
}

/// Numerical tolerances shared by the analysis subcommands.
#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Relative singular-value cutoff for rank decisions
    #[arg(long, value_name = "TOL", default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Modulus below which a coordinate counts as zero in support counts
    #[arg(long, value_name = "EPS", default_value_t = DEFAULT_ZERO_THRESHOLD)]
    zero_threshold: f64,
    /// Largest dimension for the minimal-support subset search
    #[arg(long, value_name = "D", default_value_t = DEFAULT_SUPPORT_CAP)]
    support_cap: usize,
    /// Largest dimension for the deficiency profile
    #[arg(long, value_name = "D", default_value_t = DEFAULT_PROFILE_CAP)]
    profile_cap: usize,
}

impl ToleranceArgs {
    pub fn support_config(&self) -> Result<SupportConfig, CliError> {
        let rank = RankConfig {
            tol: self.rank_tol,
            ..RankConfig::default()
        };
        rank.validate().map_err(|e| CliError::input(e.into()))?;
        if !(self.zero_threshold.is_finite() && self.zero_threshold > 0.0) {
            return Err(CliError::input(anyhow::anyhow!(
                "--zero-threshold must be positive and finite"
            )));
        }
        Ok(SupportConfig {
            rank,
            zero_threshold: self.zero_threshold,
            max_dim: self.support_cap,
        })
    }

    pub fn check_profile_cap(&self, d: usize) -> Result<(), CliError> {
        if d > self.profile_cap {
            return Err(CliError::cap(anyhow::anyhow!(
                "dimension {d} exceeds the deficiency-profile cap {} (raise it with --profile-cap)",
                self.profile_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    error: anyhow::Error,
}

impl CliError {
    pub const VERIFY: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const CAP: u8 = 3;

    pub fn input(error: anyhow::Error) -> Self {
        Self {
            code: Self::INPUT,
            error,
        }
    }

    pub fn cap(error: anyhow::Error) -> Self {
        Self {
            code: Self::CAP,
            error,
        }
    }

    pub fn io(error: io::Error) -> Self {
        Self::input(error.into())
    }
}

impl From<incompat::Error> for CliError {
    fn from(e: incompat::Error) -> Self {
        match e {
            incompat::Error::TooLarge { .. } => Self::cap(e.into()),
            _ => Self::input(e.into()),
        }
    }
}

/// Stdout, or a file when a path is given.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::input(anyhow::anyhow!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Exit status of a completed run.
pub enum Status {
    Ok,
    VerifyFailed,
    CapExceeded,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::input(anyhow::anyhow!(
                "--threads must be at least 1"
            )));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::input(e.into()))?;
    }
    match cli.command {
        Command::Analyze(args) => analyze::run(&args),
        Command::ProfileCurve(args) => curves::profile_curve(&args),
        Command::ZetaCurve(args) => curves::zeta_curve(&args),
        Command::VerifyCorpus(args) => corpus::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerifyFailed) => ExitCode::from(CliError::VERIFY),
        Ok(Status::CapExceeded) => ExitCode::from(CliError::CAP),
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
