//! `report.json` and `profiles.csv`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use bel_core::Check;
use serde::Serialize;

use crate::config::ScenarioConfig;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub relation: String,
    pub verdict: &'static str,
    /// `null` when the check could not be evaluated.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        Self {
            name: c.name.clone(),
            relation: c.relation.clone(),
            verdict: if c.passed { "pass" } else { "fail" },
            measured: finite(c.measured),
            tolerance: finite(c.tolerance),
            detail: c.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEcho {
    pub r_max: f64,
    pub nodes: usize,
    pub spacing: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub scenario: String,
    pub run: String,
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifold: Option<String>,
    pub grid: GridEcho,
    pub tol: f64,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    /// Scalar findings that are not pass/fail (crossing radius, fitted
    /// constants, ...).
    pub findings: BTreeMap<String, serde_json::Value>,
    pub timings: Timings,
}

impl RunReport {
    pub fn new(
        run: &str,
        cfg: &ScenarioConfig,
        checks: &[Check],
        findings: BTreeMap<String, serde_json::Value>,
        seconds: f64,
    ) -> Self {
        Self {
            schema: SCHEMA,
            scenario: cfg.scenario.name().to_owned(),
            run: run.to_owned(),
            parameters: cfg.params.clone(),
            manifold: cfg.manifold.map(|m| m.name().to_owned()),
            grid: GridEcho {
                r_max: cfg.grid.r_max,
                nodes: cfg.grid.nodes,
                spacing: cfg.grid.spacing.to_string(),
            },
            tol: cfg.tol,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks: checks.iter().map(CheckRecord::from).collect(),
            findings,
            timings: Timings {
                total_seconds: seconds,
            },
        }
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()
    }
}

/// Named node-aligned columns; `None` columns are left out of the file.
pub type Columns = Vec<(&'static str, Option<Vec<f64>>)>;

/// Writes a header row and one row per node, floats with 17 significant
/// digits.
pub fn emit_profiles(columns: &Columns, path: &Path) -> io::Result<()> {
    let present: Vec<(&str, &Vec<f64>)> = columns
        .iter()
        .filter_map(|(name, col)| col.as_ref().map(|c| (*name, c)))
        .collect();
    let Some(rows) = present.first().map(|(_, c)| c.len()) else {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no profile columns"));
    };
    if rows == 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "empty profile"));
    }
    if let Some((name, _)) = present.iter().find(|(_, c)| c.len() != rows) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("column {name} is not aligned with the grid"),
        ));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(present.iter().map(|(n, _)| *n))?;
    for i in 0..rows {
        w.write_record(present.iter().map(|(_, c)| format!("{:.16e}", c[i])))?;
    }
    w.flush()
}
