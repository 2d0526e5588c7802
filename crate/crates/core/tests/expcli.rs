use kinklab_core::expcli::{
    diagnostics_csv, execute, expand_grid, format_value, sweep, CellStatus, CheckResult, ExperimentConfig, RunStatus, Scenario,
};
use kinklab_core::Error;
use proptest::prelude::*;
use serde_json::{json, Value};

fn small_orbital() -> Value {
    json!({
        "scenario": "orbital",
        "grid": {"L": 40.0, "N": 256},
        "perturbation": {"width": 1.0},
        "T": 1.0,
        "dt": 0.05,
        "sample_every": 0.25
    })
}

fn config_path(r: Result<ExperimentConfig, Error>) -> String {
    match r {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn every_default_validates() {
    for s in Scenario::ALL {
        let c = ExperimentConfig::defaults(s);
        c.validate().unwrap();
        let again = ExperimentConfig::from_value(json!({}), Some(s)).unwrap();
        assert_eq!(again, c, "{}", s.name());
    }
}

#[test]
fn config_errors_name_the_field() {
    assert_eq!(config_path(ExperimentConfig::from_value(json!({"scenario": "orbital", "delta": -0.1}), None)), "delta");
    assert_eq!(config_path(ExperimentConfig::from_value(json!({"scenario": "orbital", "delta": 1.5}), None)), "delta");
    assert_eq!(config_path(ExperimentConfig::from_value(json!({"grid": {"L": 0.0}}), Some(Scenario::Orbital))), "grid.L");
    let p = config_path(ExperimentConfig::from_value(json!({"bogus": 1}), Some(Scenario::Spectrum)));
    assert_eq!(p, "bogus");
    assert!(ExperimentConfig::from_value(json!({}), None).is_err());
    assert!(ExperimentConfig::from_value(json!([1, 2]), None).is_err());
    assert!(matches!(ExperimentConfig::from_value(json!({"scenario": "nope"}), None), Err(Error::UnknownScenario(_))));
}

#[test]
fn nested_keys_merge_over_defaults() {
    let c = ExperimentConfig::from_value(json!({"grid": {"N": 512}}), Some(Scenario::Spectrum)).unwrap();
    let d = ExperimentConfig::defaults(Scenario::Spectrum);
    assert_eq!(c.grid.n, 512);
    assert_eq!(c.grid.half_length, d.grid.half_length);
}

#[test]
fn runs_are_deterministic() {
    let mut doc = small_orbital();
    doc["perturbation"]["shape"] = json!("random_bandlimited");
    doc["seed"] = json!(11);
    let cfg = ExperimentConfig::from_value(doc, None).unwrap();
    let a = execute(&cfg);
    let b = execute(&cfg);
    assert_eq!(a.manifest.status, RunStatus::Completed);
    assert_eq!(diagnostics_csv(&a.rows), diagnostics_csv(&b.rows));
    assert_eq!(a.results, b.results);
    let mut other = cfg.clone();
    other.seed = 12;
    assert_ne!(diagnostics_csv(&execute(&other).rows), diagnostics_csv(&a.rows));
}

#[test]
fn failed_scenario_keeps_partial_output() {
    let mut doc = small_orbital();
    doc["T"] = json!(20.0);
    doc["dt"] = json!(3.0);
    doc["boundary_threshold"] = json!(1e300);
    let out = execute(&ExperimentConfig::from_value(doc, None).unwrap());
    assert_eq!(out.manifest.status, RunStatus::Failed);
    assert!(out.manifest.error.is_some());
    assert!(!out.rows.is_empty());
}

#[test]
fn check_lines() {
    let c = CheckResult::less("x", 0.5, 1.0, "src");
    assert_eq!(c.line(), "PASS x: 5.0000000000e-1 < 1.000e0 [src]");
    assert!(!CheckResult::less("x", f64::NAN, 1.0, "src").passed);
    assert!(!CheckResult::at_least("y", 1.0, 2.0, "s").line().starts_with("PASS"));
    assert_eq!(format_value(0.1), "1.0000000000000001e-1");
    assert_eq!(format_value(0.1).parse::<f64>().unwrap(), 0.1);
}

#[test]
fn grid_expansion() {
    assert!(expand_grid(&json!({})).unwrap().is_empty());
    assert!(expand_grid(&json!({"delta": []})).unwrap().is_empty());
    let cells = expand_grid(&json!({"delta": [0.01, 0.02], "dt": [0.1, 0.2, 0.3]})).unwrap();
    assert_eq!(cells.len(), 6);
    assert!(expand_grid(&json!({"delta": 0.01})).is_err());
    assert!(expand_grid(&json!([1])).is_err());
}

#[test]
fn sweep_records_each_cell() {
    let dir = tempfile::tempdir().unwrap();
    let idx = sweep(&small_orbital(), &json!({"delta": [0.01, 3.0]}), dir.path()).unwrap();
    assert_eq!(idx.cells.len(), 2);
    let status: Vec<CellStatus> = idx.cells.iter().map(|c| c.status).collect();
    assert!(status.contains(&CellStatus::Completed));
    assert!(status.contains(&CellStatus::Invalid));
    assert!(dir.path().join("index.json").exists());
    let empty = sweep(&small_orbital(), &json!({}), &dir.path().join("e")).unwrap();
    assert!(empty.cells.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn config_round_trips(delta in 1e-4..0.1f64, n in 4u32..12, dt in 1e-3..0.1f64, seed in any::<u64>()) {
        let doc = json!({"scenario": "orbital", "delta": delta, "grid": {"N": 1usize << n}, "dt": dt, "seed": seed});
        let cfg = ExperimentConfig::from_value(doc, None).unwrap();
        let back = ExperimentConfig::from_value(serde_json::to_value(&cfg).unwrap(), None).unwrap();
        prop_assert_eq!(cfg, back);
    }
}
