//! JSON and CSV matrix files.
//!
//! JSON: `{"rows": r, "cols": c, "re": [[..], ..], "im": [[..], ..]}`, row-major,
//! `im` optional (all zero when omitted).
//!
//! CSV: one row per line, comma-separated entries of the form `a+bi`, `a-bi`
//! or a bare real `a`. No header.

use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Json,
    Csv,
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidArgument(format!(
                "unknown matrix format `{other}`"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

pub fn load_matrix<R: Read>(mut source: R, format: MatrixFormat) -> Result<ComplexMatrix> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        MatrixFormat::Json => parse_json(&text),
        MatrixFormat::Csv => parse_csv(&text),
    }
}

pub fn save_matrix<W: Write>(m: &ComplexMatrix, mut sink: W, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Json => {
            let doc = JsonMatrix {
                rows: m.rows(),
                cols: m.cols(),
                re: (0..m.rows())
                    .map(|r| (0..m.cols()).map(|c| m.get(r, c).re).collect())
                    .collect(),
                im: Some(
                    (0..m.rows())
                        .map(|r| (0..m.cols()).map(|c| m.get(r, c).im).collect())
                        .collect(),
                ),
            };
            let text =
                serde_json::to_string(&doc).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            writeln!(sink, "{text}")?;
        }
        MatrixFormat::Csv => {
            for r in 0..m.rows() {
                let line: Vec<String> =
                    (0..m.cols()).map(|c| format_complex(m.get(r, c))).collect();
                writeln!(sink, "{}", line.join(","))?;
            }
        }
    }
    Ok(())
}

fn parse_json(text: &str) -> Result<ComplexMatrix> {
    let doc: JsonMatrix = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.rows == 0 || doc.cols == 0 {
        return Err(Error::InvalidDimension(0));
    }
    check_grid(&doc.re, doc.rows, doc.cols, "re")?;
    if let Some(im) = &doc.im {
        check_grid(im, doc.rows, doc.cols, "im")?;
    }
    let mut entries = Vec::with_capacity(doc.rows * doc.cols);
    for r in 0..doc.rows {
        for c in 0..doc.cols {
            let im = doc.im.as_ref().map_or(0.0, |im| im[r][c]);
            entries.push(Complex64::new(doc.re[r][c], im));
        }
    }
    ComplexMatrix::from_row_major(doc.rows, doc.cols, entries)
}

fn check_grid(grid: &[Vec<f64>], rows: usize, cols: usize, field: &str) -> Result<()> {
    if grid.len() != rows {
        return Err(Error::Shape(format!(
            "\"{field}\" has {} rows, header says {rows}",
            grid.len()
        )));
    }
    for (r, row) in grid.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Shape(format!(
                "\"{field}\" row {r} has {} entries, header says {cols}",
                row.len()
            )));
        }
    }
    Ok(())
}

fn parse_csv(text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for token in line.split(',') {
            let z = parse_complex(token).ok_or_else(|| Error::Parse {
                line: line_no + 1,
                column,
                message: format!("cannot parse `{}` as a complex number", token.trim()),
            })?;
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: rows.len(),
                    col: row.len(),
                });
            }
            row.push(z);
            column += token.chars().count() + 1;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Shape(format!(
                    "line {} has {} entries, expected {}",
                    line_no + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty matrix".into(),
        });
    }
    let (n, m) = (rows.len(), rows[0].len());
    ComplexMatrix::from_row_major(n, m, rows.into_iter().flatten().collect())
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `a+i` style tokens.
fn parse_complex(token: &str) -> Option<Complex64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (
            body[..k].trim().parse::<f64>().ok()?,
            parse_imag(&body[k..])?,
        ),
        None => (0.0, parse_imag(body)?),
    };
    Some(Complex64::new(re, im))
}

fn parse_imag(s: &str) -> Option<f64> {
    match s.trim() {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        other => other.parse().ok(),
    }
}

fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", z.re, sign, z.im.abs())
}
