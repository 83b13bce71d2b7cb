//! CSV writing: LF line endings, comma separator, no quoting (no field ever
//! contains a comma), floats in shortest round-trip form so re-reading a file
//! reproduces every value exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// A row type with a fixed header.
pub trait CsvRecord {
    fn header() -> &'static str;
    fn to_line(&self) -> String;
}

/// Writes header plus rows; an empty row list produces a header-only file.
pub fn write_csv<T: CsvRecord>(path: &Path, rows: &[T]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(T::header().as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        out.write_all(row.to_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// One grid point of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: &'static str,
    pub horizon: u64,
    pub seed: u64,
    pub dim: usize,
    pub num_constraints: usize,
    pub regret: f64,
    /// Largest per-constraint raw violation sum.
    pub raw_violation_max: f64,
    /// Largest per-constraint clipped violation sum.
    pub clipped_violation_max: f64,
    /// Aggregated max-constraint violation sum.
    pub agg_violation: f64,
    pub runtime_ms: u64,
}

impl CsvRecord for SummaryRow {
    fn header() -> &'static str {
        "algorithm,T,seed,d,m,regret,raw_violation_max,clipped_violation_max,agg_violation,runtime_ms"
    }

    fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.horizon,
            self.seed,
            self.dim,
            self.num_constraints,
            self.regret,
            self.raw_violation_max,
            self.clipped_violation_max,
            self.agg_violation,
            self.runtime_ms
        )
    }
}

/// One learner round (opt-in trace files).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub round: u64,
    pub loss: f64,
    pub g_max: f64,
    pub lambda_norm: f64,
}

impl CsvRecord for TraceRow {
    fn header() -> &'static str {
        "t,loss,g_max,lambda_norm"
    }

    fn to_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.round, self.loss, self.g_max, self.lambda_norm
        )
    }
}

/// A skipped grid point and why; never silently dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct WarningRow {
    pub algorithm: &'static str,
    pub horizon: u64,
    pub seed: u64,
    pub reason: String,
}

impl CsvRecord for WarningRow {
    fn header() -> &'static str {
        "algorithm,T,seed,reason"
    }

    fn to_line(&self) -> String {
        // Keep the no-quoting contract even for free-form reasons.
        format!(
            "{},{},{},{}",
            self.algorithm,
            self.horizon,
            self.seed,
            self.reason.replace(',', ";")
        )
    }
}
