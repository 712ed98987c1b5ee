//! Plain-text readers and writers for signals, matrices, sign patterns and
//! run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{MeasurementEnsemble, SignPattern, SignalVector};

/// Scientific notation with 12 significant digits.
pub fn fmt_sci(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.11e}")
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {token:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, message: format!("non-finite value {token:?}") });
    }
    Ok(v)
}

/// One matrix row per non-blank line, whitespace separated.
pub fn parse_matrix(text: &str) -> Result<MeasurementEnsemble> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| parse_f64(t, line_no))
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    let n = width.ok_or(Error::Parse { line: 0, message: "empty matrix".into() })?;
    MeasurementEnsemble::from_rows(rows, n)
}

/// All whitespace-separated values in order, regardless of line layout.
pub fn parse_signal(text: &str) -> Result<SignalVector> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            values.push(parse_f64(token, idx + 1)?);
        }
    }
    if values.is_empty() {
        return Err(Error::Parse { line: 0, message: "empty signal".into() });
    }
    SignalVector::new(values)
}

/// One integer in {-1, 0, 1} per non-blank line.
pub fn parse_signs(text: &str) -> Result<SignPattern> {
    let mut signs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let v: i8 = match token {
            "-1" => -1,
            "0" | "-0" | "+0" => 0,
            "1" | "+1" => 1,
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected -1, 0 or 1, found {token:?}"),
                })
            }
        };
        signs.push(v);
    }
    SignPattern::new(signs)
}

pub fn read_matrix(path: &Path) -> Result<MeasurementEnsemble> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_signal(path: &Path) -> Result<SignalVector> {
    parse_signal(&fs::read_to_string(path)?)
}

pub fn read_signs(path: &Path) -> Result<SignPattern> {
    parse_signs(&fs::read_to_string(path)?)
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ")
}

pub fn format_matrix(a: &MeasurementEnsemble) -> String {
    a.iter_rows().map(|row| join_f64(row) + "\n").collect()
}

pub fn format_signal(x: &SignalVector) -> String {
    x.as_slice().iter().map(|v| format!("{v:e}\n")).collect()
}

pub fn format_signs(y: &SignPattern) -> String {
    y.as_slice().iter().map(|v| format!("{v}\n")).collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

/// `<path>.<suffix>`, e.g. `runs/a.csv.manifest.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub timestamp_unix: u64,
}

impl<'a, C: Serialize> Manifest<'a, C> {
    pub fn new(command: &'a str, config: &'a C, seeds: Vec<u64>, outputs: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seeds,
            outputs,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidArgument(format!("manifest encoding: {e}")))?;
        write_text(path, &(json + "\n"))
    }
}
