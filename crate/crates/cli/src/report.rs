//! Report files: CSV tables with a `#`-comment metadata header, and atomic
//! writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Provenance written at the top of every report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub resamples: usize,
    pub weights: String,
    pub taxonomy: String,
    pub setups: String,
    pub aggregate: String,
}

impl ReportMeta {
    pub fn new(command: &str, cfg: &RunConfig, setups: &str) -> ReportMeta {
        ReportMeta {
            tool: "mqmeta".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: cfg.seed,
            resamples: cfg.resamples,
            weights: cfg.weights.to_string(),
            taxonomy: cfg.taxonomy.label(),
            setups: setups.into(),
            aggregate: cfg.aggregate.to_string(),
        }
    }

    fn header(&self) -> String {
        format!(
            "# tool: {} {}\n# command: {}\n# seed: {}\n# resamples: {}\n# weights: {}\n# taxonomy: {}\n# setups: {}\n# aggregate: {}\n",
            self.tool,
            self.version,
            self.command,
            self.seed,
            self.resamples,
            self.weights,
            self.taxonomy,
            self.setups,
            self.aggregate
        )
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Formats a number for reports; missing values are empty.
pub fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:?}"),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.into(),
        _ => String::new(),
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, meta: Option<&ReportMeta>) -> Result<String> {
        let mut out = Vec::new();
        if let Some(m) = meta {
            out.extend_from_slice(m.header().as_bytes());
        }
        let mut w = csv::Writer::from_writer(&mut out);
        let csv_err = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
        drop(w);
        Ok(String::from_utf8(out).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path, meta: &ReportMeta) -> Result<()> {
        write_atomic(path, self.to_csv(Some(meta))?.as_bytes())
    }
}
