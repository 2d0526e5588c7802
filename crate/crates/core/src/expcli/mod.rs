//! Configuration-driven experiment runner.
//!
//! A run resolves an [`ExperimentConfig`] against the scenario defaults,
//! executes the scenario and writes three files to `output_dir`:
//!
//! - `diagnostics.csv`: one row per trajectory sample (header only for
//!   scenarios without a trajectory)
//! - `spectra.json`: the scenario's scalar and spectral results
//! - `manifest.json`: the resolved config, version, wall time, status and
//!   the pass/fail checks
//!
//! Everything but the wall time is a pure function of the config.

mod config;
mod output;
mod perturbation;
mod scenarios;
mod sweep;

pub use config::{
    ExperimentConfig, GridConfig, PerturbationShape, PerturbationSpec, ScaleOverride, Scenario, ScenarioOptions,
};
pub use output::{diagnostics_csv, format_value, AcceptanceSummary, CheckResult, RunManifest, RunStatus};
pub use perturbation::build_perturbation;
pub use sweep::{expand_grid, sweep, CellStatus, SweepCell, SweepIndex};

use std::time::Instant;

use serde_json::Value;

use crate::error::Result;
use crate::virials::DiagnosticsRecord;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    /// Contents of `spectra.json`.
    pub results: Value,
    pub rows: Vec<DiagnosticsRecord>,
}

/// Runs the scenario in memory. Scenario failures land in the manifest
/// status; whatever was computed before the failure is kept.
pub fn execute(cfg: &ExperimentConfig) -> RunOutcome {
    let start = Instant::now();
    let mut out = scenarios::ScenarioOutput::default();
    let res = scenarios::run_scenario(cfg, &mut out);
    let passed = out.checks.iter().filter(|c| c.passed).count();
    let mut results = serde_json::Map::new();
    results.insert("scenario".into(), Value::String(cfg.scenario.name().into()));
    results.extend(out.results);
    let manifest = RunManifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        status: if res.is_ok() { RunStatus::Completed } else { RunStatus::Failed },
        error: res.err().map(|e| e.to_string()),
        acceptance: AcceptanceSummary { passed, failed: out.checks.len() - passed },
        checks: out.checks,
        outputs: vec!["diagnostics.csv".into(), "spectra.json".into(), "manifest.json".into()],
    };
    RunOutcome { manifest, results: Value::Object(results), rows: out.rows }
}

/// [`execute`] and write the three output files.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let outcome = execute(cfg);
    let dir = &cfg.output_dir;
    output::write_outputs(dir, &outcome.rows, &outcome.results)?;
    output::write_json(&dir.join("manifest.json"), &outcome.manifest)?;
    Ok(outcome)
}
