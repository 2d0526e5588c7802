use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::ExperimentConfig;
use super::output::{write_json, RunStatus};
use super::run;
use crate::error::{config_error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Completed,
    Failed,
    /// The merged config did not validate; nothing was run.
    Invalid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: usize,
    pub parameters: Map<String, Value>,
    /// Relative to the sweep directory.
    pub manifest: Option<String>,
    pub status: CellStatus,
    pub error: Option<String>,
    pub checks_passed: Option<usize>,
    pub checks_failed: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepIndex {
    pub template: Value,
    pub grid: Value,
    pub cells: Vec<SweepCell>,
}

/// Cartesian product of `{"dotted.key": [values...]}`. An empty grid, or
/// any empty list, yields no cells.
pub fn expand_grid(grid: &Value) -> Result<Vec<Map<String, Value>>> {
    let obj = grid.as_object().ok_or_else(|| config_error("<grid>", "parameter grid must be a JSON object"))?;
    if obj.is_empty() {
        return Ok(Vec::new());
    }
    let mut cells = vec![Map::new()];
    for (key, vals) in obj {
        let vals = vals.as_array().ok_or_else(|| config_error(key.clone(), "grid entries must be arrays"))?;
        let mut next = Vec::with_capacity(cells.len() * vals.len());
        for c in &cells {
            for v in vals {
                let mut c = c.clone();
                c.insert(key.clone(), v.clone());
                next.push(c);
            }
        }
        cells = next;
    }
    Ok(cells)
}

fn set_path(doc: &mut Value, dotted: &str, v: Value) {
    let mut cur = doc;
    let parts: Vec<&str> = dotted.split('.').collect();
    for p in &parts[..parts.len() - 1] {
        if !cur.get(*p).is_some_and(Value::is_object) {
            cur[*p] = Value::Object(Map::new());
        }
        cur = &mut cur[*p];
    }
    cur[parts[parts.len() - 1]] = v;
}

/// Runs every cell of the grid in parallel under `out/cell-NNN` and writes
/// `out/index.json`. A failing cell is recorded and does not stop the rest.
pub fn sweep(template: &Value, grid: &Value, out: &Path) -> Result<SweepIndex> {
    if !template.is_object() {
        return Err(config_error("<template>", "template must be a JSON object"));
    }
    let cells = expand_grid(grid)?;
    fs::create_dir_all(out)?;
    let results: Vec<SweepCell> = cells
        .into_par_iter()
        .enumerate()
        .map(|(index, parameters)| {
            let mut doc = template.clone();
            for (k, v) in &parameters {
                set_path(&mut doc, k, v.clone());
            }
            let rel = format!("cell-{index:03}");
            doc["output_dir"] = Value::String(out.join(&rel).to_string_lossy().into_owned());
            let mut cell = SweepCell {
                index,
                parameters,
                manifest: None,
                status: CellStatus::Invalid,
                error: None,
                checks_passed: None,
                checks_failed: None,
            };
            let cfg = match ExperimentConfig::from_value(doc, None) {
                Ok(c) => c,
                Err(e) => {
                    cell.error = Some(e.to_string());
                    return cell;
                }
            };
            match run(&cfg) {
                Ok(o) => {
                    cell.manifest = Some(format!("{rel}/manifest.json"));
                    cell.status = match o.manifest.status {
                        RunStatus::Completed => CellStatus::Completed,
                        RunStatus::Failed => CellStatus::Failed,
                    };
                    cell.error = o.manifest.error;
                    cell.checks_passed = Some(o.manifest.acceptance.passed);
                    cell.checks_failed = Some(o.manifest.acceptance.failed);
                }
                Err(e) => {
                    cell.status = CellStatus::Failed;
                    cell.error = Some(e.to_string());
                }
            }
            cell
        })
        .collect();
    let index = SweepIndex { template: template.clone(), grid: grid.clone(), cells: results };
    write_json(&out.join("index.json"), &index)?;
    Ok(index)
}
