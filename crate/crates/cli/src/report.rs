//! Experiment reports: named tables with typed cells, serialized to JSON
//! (one document) or CSV (one file per table). Serialization is
//! deterministic so identical (config, seed) pairs produce byte-identical
//! output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render_csv(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => format_float(*f),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }
}

/// Shortest-roundtrip float formatting (matches Rust's `Display`), which is
/// deterministic across runs and platforms.
fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Provenance attached to every table: which seed and step produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
}

impl Table {
    pub fn new(name: &str, columns: &[&str], provenance: Provenance) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row arity in {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# schema_version={SCHEMA_VERSION} seed={} dt={}",
            self.provenance.seed,
            format_float(self.provenance.dt)
        );
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render_csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub dt: f64,
    /// Echo of the configuration the report was produced from.
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(experiment: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            seed: cfg.seed,
            dt: cfg.dt,
            config: cfg.clone(),
            tables: Vec::new(),
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            seed: self.seed,
            dt: self.dt,
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializable");
        s.push('\n');
        s
    }

    /// Write the report into `dir` as either a single JSON document or one
    /// CSV file per table. Returns the paths written.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> anyhow::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut written = Vec::new();
        match format {
            OutputFormat::Json => {
                let path = dir.join(format!("{}.json", self.experiment));
                std::fs::write(&path, self.to_json())?;
                written.push(path);
            }
            OutputFormat::Csv => {
                for table in &self.tables {
                    let path = dir.join(format!("{}__{}.csv", self.experiment, table.name));
                    std::fs::write(&path, table.to_csv())?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => anyhow::bail!("unknown format {other:?} (expected csv or json)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering_is_stable() {
        let mut t = Table::new(
            "demo",
            &["name", "value", "flag"],
            Provenance { seed: 9, dt: 0.01 },
        );
        t.push_row(vec!["a".into(), 1.5.into(), true.into()]);
        t.push_row(vec!["b, quoted".into(), 2.0.into(), false.into()]);
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "# schema_version=1 seed=9 dt=0.01\nname,value,flag\na,1.5,true\n\"b, quoted\",2.0,false\n"
        );
    }

    #[test]
    fn float_formatting_keeps_integers_readable() {
        assert_eq!(format_float(20.0), "20.0");
        assert_eq!(format_float(0.01), "0.01");
        assert_eq!(format_float(33.94131215288539), "33.94131215288539");
    }
}
