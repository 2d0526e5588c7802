use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::virials::{DiagnosticsRecord, DIAGNOSTICS_COLUMNS};

/// One pass/fail line of a run's acceptance summary. `source` names the
/// `spectra.json` key or `diagnostics.csv` column the value comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub comparison: String,
    pub threshold: f64,
    pub source: String,
}

impl CheckResult {
    fn new(name: &str, value: f64, comparison: &str, threshold: f64, passed: bool, source: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: passed && value.is_finite(),
            value,
            comparison: comparison.to_string(),
            threshold,
            source: source.to_string(),
        }
    }

    pub fn less(name: &str, value: f64, threshold: f64, source: &str) -> Self {
        Self::new(name, value, "<", threshold, value < threshold, source)
    }

    pub fn at_least(name: &str, value: f64, threshold: f64, source: &str) -> Self {
        Self::new(name, value, ">=", threshold, value >= threshold, source)
    }

    pub fn at_most(name: &str, value: f64, threshold: f64, source: &str) -> Self {
        Self::new(name, value, "<=", threshold, value <= threshold, source)
    }

    pub fn greater(name: &str, value: f64, threshold: f64, source: &str) -> Self {
        Self::new(name, value, ">", threshold, value > threshold, source)
    }

    pub fn equal(name: &str, value: f64, target: f64, source: &str) -> Self {
        Self::new(name, value, "==", target, value == target, source)
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {:.10e} {} {:.3e} [{}]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.comparison,
            self.threshold,
            self.source
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceSummary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_time_s: f64,
    pub status: RunStatus,
    pub error: Option<String>,
    pub acceptance: AcceptanceSummary,
    pub checks: Vec<CheckResult>,
    pub outputs: Vec<String>,
}

/// Values in `diagnostics.csv`: 17 significant digits, scientific form.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn diagnostics_csv(rows: &[DiagnosticsRecord]) -> String {
    let mut s = DIAGNOSTICS_COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        let vals: Vec<String> = r.values().iter().map(|v| format_value(*v)).collect();
        let _ = writeln!(s, "{}", vals.join(","));
    }
    s
}

pub(crate) fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub(crate) fn write_outputs(dir: &Path, rows: &[DiagnosticsRecord], results: &Value) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("diagnostics.csv"), diagnostics_csv(rows))?;
    write_json(&dir.join("spectra.json"), results)
}
