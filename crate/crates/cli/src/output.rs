//! CSV tables and run records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use offres_core::Trajectory;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Column-named numeric table; `NaN` cells are written as `nan`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    /// `t` followed by every series in order.
    pub fn from_trajectory(tr: &Trajectory) -> Self {
        let mut columns = vec!["t".to_string()];
        columns.extend(tr.series.iter().map(|s| s.name.clone()));
        let rows = (0..tr.len())
            .map(|i| {
                std::iter::once(tr.times[i])
                    .chain(tr.series.iter().map(|s| s.values[i]))
                    .collect()
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_number(&mut out, *v);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        if self.rows.is_empty() {
            return Err(CliError::Numerical(format!(
                "refusing to write empty table {}",
                path.display()
            )));
        }
        ensure_parent(path)?;
        fs::write(path, self.to_csv()).map_err(|e| CliError::io(path, e))
    }
}

/// Twelve significant digits, `nan` for gaps.
fn write_number(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else if v == 0.0 {
        // fold -0 into 0
        out.push_str("0.00000000000e0");
    } else {
        let _ = write!(out, "{v:.11e}");
    }
}

pub fn parse_csv(text: &str) -> Option<Table> {
    let mut lines = text.lines();
    let columns: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|x| {
                    if x == "nan" {
                        Some(f64::NAN)
                    } else {
                        x.parse().ok()
                    }
                })
                .collect::<Option<Vec<f64>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Table { columns, rows })
}

pub(crate) fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
        }
        _ => Ok(()),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Provenance written next to every output bundle as `<prefix>.run.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub version: String,
    pub command: String,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub diagnostics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunRecord {
    pub fn new(command: impl Into<String>, config_bytes: &[u8]) -> Self {
        Self {
            config_hash: sha256_hex(config_bytes),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            wall_time_s: 0.0,
            step: None,
            method: None,
            seed: None,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Takes step, method, notes and diagnostics from a trajectory; keys
    /// are prefixed when several trajectories feed one record.
    pub fn absorb(&mut self, tr: &Trajectory, prefix: &str) {
        if self.step.is_none() {
            self.step = tr.meta.step;
        }
        if self.method.is_none() {
            self.method = tr.meta.method.clone();
        }
        if self.seed.is_none() {
            self.seed = tr.meta.seed;
        }
        for (k, v) in &tr.meta.diagnostics {
            let key = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            self.diagnostics.insert(key, *v);
        }
        for n in &tr.meta.notes {
            if !self.notes.contains(n) {
                self.notes.push(n.clone());
            }
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        ensure_parent(path)?;
        // NaN is not valid JSON
        let mut rec = self.clone();
        rec.diagnostics.retain(|_, v| v.is_finite());
        let text = serde_json::to_string_pretty(&rec).map_err(|e| CliError::io(path, e))?;
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}

/// `<prefix><suffix>` as a path.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
