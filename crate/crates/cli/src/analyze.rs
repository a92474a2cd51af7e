use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use incompat::deficiency::{deficiency_profile_with, DeficiencyProfile, ProfileChecks};
use incompat::matrix::{save_matrix, TransitionMatrix};
use incompat::rank::{KernelWitness, RankConfig};
use incompat::support::{
    min_support_uncertainty_with, support_counts, SupportConfig, SupportWitness,
};
use serde::Serialize;

use crate::source::{infer_format, InputDescriptor, MatrixArgs};
use crate::{open_output, CliError, Status, ToleranceArgs};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
    /// Exit with status 1 if any cross-check fails
    #[arg(long)]
    verify: bool,
    /// Emit a single JSON document instead of text
    #[arg(long)]
    json: bool,
    /// Include wall-clock timings in JSON output
    #[arg(long)]
    timings: bool,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Also write the analyzed matrix (format from the extension, JSON by default)
    #[arg(long, value_name = "PATH")]
    emit_matrix: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Settings {
    rank_tol: f64,
    zero_threshold: f64,
    nonzero_threshold: f64,
    witness_tolerance: f64,
    support_cap: usize,
}

#[derive(Debug, Serialize)]
struct RoutesCheck {
    chi: usize,
    n_ab_min: usize,
    pass: bool,
}

/// At `tau >= 0`: unit deficiency on both sides and all-nonzero kernels.
#[derive(Debug, Serialize)]
struct TauCheck {
    tau: usize,
    r_row: usize,
    r_col: usize,
    row_kernel: Option<KernelWitness>,
    col_kernel: Option<KernelWitness>,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Checks {
    profile: ProfileChecks,
    profile_pass: bool,
    routes: Option<RoutesCheck>,
    unit_at_tau: Option<TauCheck>,
}

#[derive(Debug, Serialize)]
struct Timings {
    profile_ms: f64,
    support_ms: f64,
    checks_ms: f64,
}

#[derive(Debug, Serialize)]
struct AnalysisReport {
    input: InputDescriptor,
    dim: usize,
    settings: Settings,
    profile: DeficiencyProfile,
    support: Option<SupportWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support_skipped: Option<String>,
    checks: Checks,
    worst_gap_ratio: f64,
    fragile: bool,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn tau_check(u: &TransitionMatrix, p: &DeficiencyProfile, config: &RankConfig) -> Option<TauCheck> {
    let t = usize::try_from(p.tau).ok()?;
    let kernel = |w: &Option<incompat::deficiency::DeficiencyWitness>| {
        w.as_ref().and_then(|w| w.kernel(u, config).ok())
    };
    let row_kernel = kernel(&p.row_witnesses[t]);
    let col_kernel = kernel(&p.col_witnesses[t]);
    let good = |k: &Option<KernelWitness>| {
        k.as_ref()
            .is_some_and(|k| k.all_nonzero && k.residual <= config.witness_tolerance)
    };
    let pass =
        p.r_row_values[t] == 1 && p.r_col_values[t] == 1 && good(&row_kernel) && good(&col_kernel);
    Some(TauCheck {
        tau: t,
        r_row: p.r_row_values[t],
        r_col: p.r_col_values[t],
        row_kernel,
        col_kernel,
        pass,
    })
}

fn routes_check(
    u: &TransitionMatrix,
    p: &DeficiencyProfile,
    w: &SupportWitness,
    config: &SupportConfig,
) -> Result<RoutesCheck, CliError> {
    // Recount the witness state independently of the search bookkeeping.
    let counts = support_counts(&w.state_in_a, u, config.zero_threshold)?;
    Ok(RoutesCheck {
        chi: p.chi,
        n_ab_min: w.n_ab,
        pass: counts.n_ab == w.n_ab && p.chi == w.n_ab,
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<Status, CliError> {
    let (u, input) = args.matrix.load()?;
    let config = args.tolerances.support_config()?;
    let d = u.dim();
    args.tolerances.check_profile_cap(d)?;

    let start = Instant::now();
    let profile = deficiency_profile_with(&u, &config.rank)?;
    let profile_ms = ms(start);

    let start = Instant::now();
    let (min, support_skipped) = if d <= config.max_dim {
        (Some(min_support_uncertainty_with(&u, &config)?), None)
    } else {
        let msg = format!(
            "dimension {d} exceeds the support-search cap {} (raise it with --support-cap); \
             reporting the deficiency route only",
            config.max_dim
        );
        eprintln!("warning: {msg}");
        (None, Some(msg))
    };
    let support_ms = ms(start);

    let start = Instant::now();
    let checks_profile = profile.checks();
    let routes = match &min {
        Some(m) => Some(routes_check(&u, &profile, &m.witness, &config)?),
        None => None,
    };
    let unit_at_tau = tau_check(&u, &profile, &config.rank);
    let checks_ms = ms(start);

    let passed = checks_profile.all()
        && routes.as_ref().is_none_or(|c| c.pass)
        && unit_at_tau.as_ref().is_none_or(|c| c.pass);
    let worst_gap_ratio = min
        .as_ref()
        .map_or(0.0, |m| m.worst_gap_ratio)
        .max(profile.worst_gap_ratio);
    let mut report = AnalysisReport {
        input,
        dim: d,
        settings: Settings {
            rank_tol: config.rank.tol,
            zero_threshold: config.zero_threshold,
            nonzero_threshold: config.rank.nonzero_threshold,
            witness_tolerance: config.rank.witness_tolerance,
            support_cap: config.max_dim,
        },
        profile,
        support: min.map(|m| m.witness),
        support_skipped,
        checks: Checks {
            profile_pass: checks_profile.all(),
            profile: checks_profile,
            routes,
            unit_at_tau,
        },
        worst_gap_ratio,
        fragile: worst_gap_ratio > incompat::rank::FRAGILE_GAP,
        passed,
        timings: Some(Timings {
            profile_ms,
            support_ms,
            checks_ms,
        }),
    };

    if let Some(path) = &args.emit_matrix {
        let file = File::create(path).map_err(|e| {
            CliError::input(anyhow::anyhow!("cannot create {}: {e}", path.display()))
        })?;
        let mut sink = BufWriter::new(file);
        save_matrix(u.matrix(), &mut sink, infer_format(path).into())?;
        sink.flush().map_err(CliError::io)?;
    }

    let mut out = open_output(args.output.as_deref())?;
    if args.json {
        if !args.timings {
            report.timings = None;
        }
        serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::input(e.into()))?;
        writeln!(out).map_err(CliError::io)?;
        out.flush().map_err(CliError::io)?;
        return Ok(status(
            args.verify,
            report.passed,
            report.support_skipped.is_some(),
        ));
    }
    write_text(&mut out, &report).map_err(CliError::io)?;
    out.flush().map_err(CliError::io)?;
    Ok(status(
        args.verify,
        report.passed,
        report.support_skipped.is_some(),
    ))
}

fn status(verify: bool, passed: bool, capped: bool) -> Status {
    if verify && !passed {
        Status::VerifyFailed
    } else if capped {
        Status::CapExceeded
    } else {
        Status::Ok
    }
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn write_text(out: &mut dyn Write, r: &AnalysisReport) -> std::io::Result<()> {
    let p = &r.profile;
    writeln!(out, "input      {}", r.input)?;
    writeln!(out, "dimension  {}", r.dim)?;
    writeln!(out, "R_t        {}", list(&p.r_values))?;
    writeln!(out, "R_row_t    {}", list(&p.r_row_values))?;
    writeln!(out, "R_col_t    {}", list(&p.r_col_values))?;
    writeln!(out, "tau        {}", p.tau)?;
    writeln!(out, "chi        {}", p.chi)?;
    for (t, w) in p.witnesses.iter().enumerate() {
        if let Some(w) = w {
            writeln!(
                out,
                "  t={t}: {:?} deficiency {} at rows {:?} cols {:?}",
                w.orientation,
                w.deficiency,
                w.selector.rows(),
                w.selector.cols()
            )?;
        }
    }
    match (&r.support, &r.support_skipped) {
        (Some(s), _) => {
            writeln!(
                out,
                "n_AB^min   {} (n_A = {}, n_B = {})",
                s.n_ab, s.n_a, s.n_b
            )?;
            writeln!(out, "  S_A {:?}, S_B {:?}", s.subset_a, s.subset_b)?;
            let state: Vec<String> = s
                .state_in_a
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(out, "  state in A basis: [{}]", state.join(", "))?;
        }
        (None, Some(msg)) => writeln!(out, "n_AB^min   skipped: {msg}")?,
        (None, None) => {}
    }
    writeln!(out, "checks")?;
    writeln!(
        out,
        "  profile structure       {}",
        verdict(r.checks.profile_pass)
    )?;
    if let Some(c) = &r.checks.routes {
        writeln!(
            out,
            "  d - tau = n_AB^min      {} ({} vs {})",
            verdict(c.pass),
            c.chi,
            c.n_ab_min
        )?;
    }
    if let Some(c) = &r.checks.unit_at_tau {
        writeln!(
            out,
            "  unit deficiency at tau  {} (row {}, col {})",
            verdict(c.pass),
            c.r_row,
            c.r_col
        )?;
    }
    writeln!(
        out,
        "worst gap ratio {:e}{}",
        r.worst_gap_ratio,
        if r.fragile {
            " (FRAGILE rank decision)"
        } else {
            ""
        }
    )?;
    writeln!(
        out,
        "tolerances rank_tol={:e} zero_threshold={:e}",
        r.settings.rank_tol, r.settings.zero_threshold
    )?;
    if let Some(t) = &r.timings {
        writeln!(
            out,
            "timings    profile {:.3} ms, support {:.3} ms, checks {:.3} ms",
            t.profile_ms, t.support_ms, t.checks_ms
        )?;
    }
    Ok(())
}
