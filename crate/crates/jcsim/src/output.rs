//! Deterministic artifact serialization: tabular series (CSV/TSV, 17
//! significant digits, LF line endings) and the JSON summary. Repeated runs
//! of the same configuration produce byte-identical files.

use crate::config::OutputFormat;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// A column-major numeric table with a header row.
#[derive(Clone, Debug)]
pub struct Table {
    headers: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Table {
    /// Build from equal-length named columns.
    pub fn new(named_columns: Vec<(&str, Vec<f64>)>) -> Result<Table> {
        if named_columns.is_empty() {
            return Err(Error::Config("a table needs at least one column".into()));
        }
        let rows = named_columns[0].1.len();
        if named_columns.iter().any(|(_, c)| c.len() != rows) {
            return Err(Error::Config("table columns must have equal length".into()));
        }
        let headers = named_columns.iter().map(|(h, _)| (*h).to_owned()).collect();
        let columns = named_columns.into_iter().map(|(_, c)| c).collect();
        Ok(Table { headers, columns })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    /// True when every cell is a finite number.
    pub fn is_finite(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    /// Render with the given separator. 17-significant-digit scientific
    /// notation round-trips f64 exactly; lines end with a bare LF.
    pub fn render(&self, format: OutputFormat) -> String {
        let sep = format.separator();
        let mut out = String::new();
        for (i, h) in self.headers.iter().enumerate() {
            if i > 0 {
                out.push(sep);
            }
            out.push_str(h);
        }
        out.push('\n');
        for row in 0..self.rows() {
            for (i, col) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(sep);
                }
                let _ = write!(out, "{:.16e}", col[row]);
            }
            out.push('\n');
        }
        out
    }
}

/// The files one run produces. The summary always also goes to stdout.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    /// Structured metrics; printed to stdout and written as `*.summary.json`.
    pub summary: serde_json::Value,
    /// Main time-series table, when the scenario produces one.
    pub series: Option<Table>,
    /// Spectral-peak sidecar table, when the scenario produces one.
    pub peaks: Option<Table>,
}

/// Pretty, key-sorted JSON with a trailing newline (stable across runs).
pub fn render_summary(summary: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Sidecar path: `out/run.csv` → `out/run.peaks.csv` / `out/run.summary.json`.
fn sidecar(series_path: &Path, suffix: &str) -> PathBuf {
    let stem = series_path.file_stem().unwrap_or_default().to_string_lossy();
    series_path.with_file_name(format!("{stem}{suffix}"))
}

/// Where a run's files will land, given the requested series path.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputPaths {
    pub series: PathBuf,
    pub peaks: PathBuf,
    pub summary: PathBuf,
}

impl OutputPaths {
    pub fn for_series_path(series_path: &Path, format: OutputFormat) -> OutputPaths {
        let ext = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Tsv => "tsv",
        };
        OutputPaths {
            series: series_path.to_owned(),
            peaks: sidecar(series_path, &format!(".peaks.{ext}")),
            summary: sidecar(series_path, ".summary.json"),
        }
    }
}

/// Write every artifact the run produced next to `series_path`, creating
/// parent directories as needed. Returns the paths written, in a stable
/// order (series, peaks, summary).
pub fn write_artifacts(
    artifacts: &RunArtifacts,
    series_path: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    let paths = OutputPaths::for_series_path(series_path, format);
    if let Some(parent) = paths.series.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut written = Vec::new();
    if let Some(series) = &artifacts.series {
        fs::write(&paths.series, series.render(format))?;
        written.push(paths.series.clone());
    }
    if let Some(peaks) = &artifacts.peaks {
        fs::write(&paths.peaks, peaks.render(format))?;
        written.push(paths.peaks.clone());
    }
    fs::write(&paths.summary, render_summary(&artifacts.summary))?;
    written.push(paths.summary);
    Ok(written)
}
