//! Where the transition matrix comes from: a file or a named family.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use incompat::matrix::{
    bronzan_rotation, dft_matrix, identity, load_matrix, qubit_rotation, random_unitary,
    MatrixFormat, TransitionMatrix,
};
use serde::Serialize;

use crate::CliError;

/// Default unitarity tolerance for matrices read from files.
pub const FILE_UNITARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Identity,
    Dft,
    Qubit,
    Bronzan,
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Dft => "dft",
            Family::Qubit => "qubit",
            Family::Bronzan => "bronzan",
            Family::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => MatrixFormat::Json,
            FormatArg::Csv => MatrixFormat::Csv,
        }
    }
}

impl fmt::Display for FormatArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormatArg::Json => "json",
            FormatArg::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Read the transition matrix from a file
    #[arg(long, value_name = "PATH", conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// File format; inferred from the extension when omitted
    #[arg(long, value_enum, requires = "input")]
    pub format: Option<FormatArg>,
    /// Accepted deviation max|U^H U - I| for file input
    #[arg(long, value_name = "TOL", default_value_t = FILE_UNITARITY_TOL, requires = "input")]
    pub unitarity_tol: f64,

    /// Built-in matrix family
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What was analyzed, recorded verbatim in reports.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum InputDescriptor {
    File {
        path: String,
        format: String,
        unitarity_tolerance: f64,
    },
    Family {
        family: Family,
        #[serde(skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        theta1: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        theta2: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        phi1: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        phi2: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl fmt::Display for InputDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputDescriptor::File { path, format, .. } => write!(f, "{path} ({format})"),
            InputDescriptor::Family { family, .. } => {
                let json = serde_json::to_value(self).map_err(|_| fmt::Error)?;
                let params: Vec<String> = json
                    .as_object()
                    .into_iter()
                    .flatten()
                    .filter(|(k, _)| *k != "source" && *k != "family")
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                write!(f, "{} family", family.name())?;
                if !params.is_empty() {
                    write!(f, " ({})", params.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

pub fn infer_format(path: &Path) -> FormatArg {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => FormatArg::Csv,
        _ => FormatArg::Json,
    }
}

impl MatrixArgs {
    pub fn load(&self) -> Result<(TransitionMatrix, InputDescriptor), CliError> {
        match (&self.input, self.family) {
            (Some(path), None) => self.load_file(path),
            (None, Some(family)) => self.build_family(family),
            _ => Err(CliError::input(anyhow::anyhow!(
                "give exactly one of --input <PATH> or --family <NAME>"
            ))),
        }
    }

    fn load_file(&self, path: &Path) -> Result<(TransitionMatrix, InputDescriptor), CliError> {
        let stray = self.family_flags_used();
        if !stray.is_empty() {
            return Err(CliError::input(anyhow::anyhow!(
                "{} only apply to --family input",
                stray.join(", ")
            )));
        }
        let format = self.format.unwrap_or_else(|| infer_format(path));
        let file = File::open(path)
            .map_err(|e| CliError::input(anyhow::anyhow!("cannot open {}: {e}", path.display())))?;
        let m = load_matrix(BufReader::new(file), format.into())
            .map_err(|e| CliError::input(anyhow::anyhow!("{}: {e}", path.display())))?;
        let u = TransitionMatrix::new(m, self.unitarity_tol)
            .map_err(|e| CliError::input(anyhow::anyhow!("{}: {e}", path.display())))?;
        Ok((
            u,
            InputDescriptor::File {
                path: path.display().to_string(),
                format: format.to_string(),
                unitarity_tolerance: self.unitarity_tol,
            },
        ))
    }

    fn family_flags_used(&self) -> Vec<&'static str> {
        [
            ("--dim", self.dim.is_some()),
            ("--theta", self.theta.is_some()),
            ("--theta1", self.theta1.is_some()),
            ("--theta2", self.theta2.is_some()),
            ("--phi1", self.phi1.is_some()),
            ("--phi2", self.phi2.is_some()),
            ("--seed", self.seed.is_some()),
        ]
        .into_iter()
        .filter(|(_, used)| *used)
        .map(|(name, _)| name)
        .collect()
    }

    fn build_family(
        &self,
        family: Family,
    ) -> Result<(TransitionMatrix, InputDescriptor), CliError> {
        let allowed: &[&str] = match family {
            Family::Identity | Family::Dft => &["--dim"],
            Family::Random => &["--dim", "--seed"],
            Family::Qubit => &["--dim", "--theta", "--phi1", "--phi2"],
            Family::Bronzan => &["--dim", "--theta1", "--theta2"],
        };
        let stray: Vec<&str> = self
            .family_flags_used()
            .into_iter()
            .filter(|f| !allowed.contains(f))
            .collect();
        if !stray.is_empty() {
            return Err(CliError::input(anyhow::anyhow!(
                "{} not used by the {} family",
                stray.join(", "),
                family.name()
            )));
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                CliError::input(anyhow::anyhow!("the {} family needs {name}", family.name()))
            })
        };
        let fixed_dim = |d: usize| match self.dim {
            Some(given) if given != d => Err(CliError::input(anyhow::anyhow!(
                "the {} family has dimension {d}, not {given}",
                family.name()
            ))),
            _ => Ok(()),
        };
        let dim = || {
            self.dim.ok_or_else(|| {
                CliError::input(anyhow::anyhow!("the {} family needs --dim", family.name()))
            })
        };
        let (mut d_out, mut theta, mut theta1, mut theta2) = (None, None, None, None);
        let (mut phi1, mut phi2, mut seed) = (None, None, None);
        let u = match family {
            Family::Identity | Family::Dft | Family::Random => {
                let d = dim()?;
                d_out = Some(d);
                match family {
                    Family::Identity => identity(d),
                    Family::Dft => dft_matrix(d),
                    _ => {
                        let s = self.seed.unwrap_or(0);
                        seed = Some(s);
                        random_unitary(d, s)
                    }
                }
            }
            Family::Qubit => {
                fixed_dim(2)?;
                let t = need(self.theta, "--theta")?;
                let (a, b) = (self.phi1.unwrap_or(0.0), self.phi2.unwrap_or(0.0));
                (theta, phi1, phi2) = (Some(t), Some(a), Some(b));
                qubit_rotation(t, a, b)
            }
            Family::Bronzan => {
                fixed_dim(3)?;
                let (a, b) = (
                    need(self.theta1, "--theta1")?,
                    need(self.theta2, "--theta2")?,
                );
                (theta1, theta2) = (Some(a), Some(b));
                bronzan_rotation(a, b)
            }
        }
        .map_err(|e| CliError::input(e.into()))?;
        let desc = InputDescriptor::Family {
            family,
            dim: d_out,
            theta,
            theta1,
            theta2,
            phi1,
            phi2,
            seed,
        };
        Ok((u, desc))
    }
}
