//! Per-run records and their CSV form.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

pub const HEADER: &str =
    "method,basis,n,kappa,seed,iterations,backward_error,residual,orthogonality_defect,wall_time_ms,status";

/// One row of a report. Numeric fields are empty when the run failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub method: String,
    pub basis: String,
    pub n: usize,
    pub kappa: f64,
    pub seed: u64,
    pub iterations: Option<usize>,
    pub backward_error: Option<f64>,
    pub residual: Option<f64>,
    pub orthogonality_defect: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub status: String,
}

impl RunRecord {
    pub fn new(method: &str, basis: &str, n: usize, kappa: f64, seed: u64) -> Self {
        RunRecord {
            method: method.to_string(),
            basis: basis.to_string(),
            n,
            kappa,
            seed,
            iterations: None,
            backward_error: None,
            residual: None,
            orthogonality_defect: None,
            wall_time_ms: None,
            status: "ok".into(),
        }
    }

    pub fn failed(mut self, err: &psdc_core::Error) -> Self {
        self.status = format!("error:{}", err.code());
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

pub fn to_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    if records.is_empty() {
        w.write_record(HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    to_csv(create(path)?, records)
}

/// Per-(method, kappa) means over the successful runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub method: String,
    pub basis: String,
    pub n: usize,
    pub kappa: f64,
    pub runs: usize,
    pub failures: usize,
    pub mean_iterations: Option<f64>,
    pub mean_backward_error: Option<f64>,
    pub mean_residual: Option<f64>,
    pub mean_orthogonality_defect: Option<f64>,
    pub mean_wall_time_ms: Option<f64>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Rows are grouped by method (in order of first appearance) and kappa.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, u64), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let m = match order.iter().position(|&m| m == r.method) {
            Some(i) => i,
            None => {
                order.push(&r.method);
                order.len() - 1
            }
        };
        // kappa is positive, so its bit pattern orders like the value
        groups.entry((m, r.kappa.to_bits())).or_default().push(r);
    }
    groups
        .into_values()
        .map(|g| {
            let ok: Vec<&RunRecord> = g.iter().copied().filter(|r| r.is_ok()).collect();
            AggregateRow {
                method: g[0].method.clone(),
                basis: g[0].basis.clone(),
                n: g[0].n,
                kappa: g[0].kappa,
                runs: g.len(),
                failures: g.len() - ok.len(),
                mean_iterations: mean(ok.iter().map(|r| r.iterations.map(|i| i as f64))),
                mean_backward_error: mean(ok.iter().map(|r| r.backward_error)),
                mean_residual: mean(ok.iter().map(|r| r.residual)),
                mean_orthogonality_defect: mean(ok.iter().map(|r| r.orthogonality_defect)),
                mean_wall_time_ms: mean(ok.iter().map(|r| r.wall_time_ms)),
            }
        })
        .collect()
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}
