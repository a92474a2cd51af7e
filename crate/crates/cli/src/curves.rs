use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use incompat::deficiency::deficiency_profile_with;
use incompat::dft::{divisors, zeta_with_divisors};

use crate::source::MatrixArgs;
use crate::{open_output, CliError, Status, ToleranceArgs};

#[derive(Debug, Args)]
pub struct ProfileCurveArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
    /// CSV destination (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZetaCurveArgs {
    /// The dimension d (at least 2)
    #[arg(long)]
    dim: usize,
    /// Evenly spaced samples on [1, d]; every divisor is added as well
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// CSV destination (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

pub fn profile_curve(args: &ProfileCurveArgs) -> Result<Status, CliError> {
    let (u, _) = args.matrix.load()?;
    let config = args.tolerances.support_config()?;
    args.tolerances.check_profile_cap(u.dim())?;
    let p = deficiency_profile_with(&u, &config.rank)?;
    let mut out = open_output(args.output.as_deref())?;
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "t,R_t,R_row_t,R_col_t")?;
        for t in 0..p.dim {
            writeln!(
                out,
                "{t},{},{},{}",
                p.r_values[t], p.r_row_values[t], p.r_col_values[t]
            )?;
        }
        out.flush()
    };
    write().map_err(CliError::io)?;
    Ok(Status::Ok)
}

/// Evenly spaced points on `[1, d]` merged with the divisors of `d`.
pub fn zeta_grid(d: usize, samples: usize) -> Vec<f64> {
    let span = d as f64 - 1.0;
    let mut xs: Vec<f64> = (0..samples)
        .map(|i| 1.0 + span * i as f64 / (samples - 1) as f64)
        .collect();
    xs.extend(divisors(d).into_iter().map(|q| q as f64));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

pub fn zeta_curve(args: &ZetaCurveArgs) -> Result<Status, CliError> {
    if args.dim < 2 {
        return Err(CliError::input(anyhow::anyhow!("--dim must be at least 2")));
    }
    if args.samples < 2 {
        return Err(CliError::input(anyhow::anyhow!(
            "--samples must be at least 2"
        )));
    }
    let divs = divisors(args.dim);
    let points = zeta_grid(args.dim, args.samples)
        .into_iter()
        .map(|x| zeta_with_divisors(args.dim, &divs, x))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = open_output(args.output.as_deref())?;
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "x,zeta,d1,d2")?;
        for p in &points {
            writeln!(out, "{},{},{},{}", p.x, p.value, p.d1, p.d2)?;
        }
        out.flush()
    };
    write().map_err(CliError::io)?;
    Ok(Status::Ok)
}
