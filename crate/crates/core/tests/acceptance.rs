//! One test per acceptance criterion. Each prints its individual checks and
//! a final `PASS`/`FAIL` line for the criterion as a whole.

use std::f64::consts::SQRT_2;

use kinklab_core::evolution::Scheme;
use kinklab_core::expcli::{execute, CheckResult, ExperimentConfig, RunOutcome, RunStatus, Scenario};
use kinklab_core::model::{energy, kink_energy};
use kinklab_core::{FieldPair, Grid, KinkBackground};

fn run(cfg: &ExperimentConfig) -> RunOutcome {
    let out = execute(cfg);
    assert_eq!(out.manifest.status, RunStatus::Completed, "{}: {:?}", cfg.scenario.name(), out.manifest.error);
    out
}

fn run_default(s: Scenario) -> RunOutcome {
    run(&ExperimentConfig::defaults(s))
}

fn number(out: &RunOutcome, key: &str) -> f64 {
    out.results[key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

fn runtime(out: &RunOutcome, limit: f64) -> CheckResult {
    CheckResult::less("runtime [s]", out.manifest.wall_time_s, limit, "manifest.json:wall_time_s")
}

fn verdict(criterion: &str, checks: &[CheckResult]) {
    for c in checks {
        println!("  {}", c.line());
    }
    let ok = !checks.is_empty() && checks.iter().all(|c| c.passed);
    println!("{} {criterion}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}");
}

#[test]
fn spectrum_of_l() {
    let out = run_default(Scenario::Spectrum);
    let mut checks: Vec<CheckResult> = out.manifest.checks.iter().filter(|c| !c.name.contains("L##")).cloned().collect();
    checks.push(runtime(&out, 30.0));
    verdict("spectrum of L", &checks);
}

#[test]
fn double_sharp_ground_state() {
    let out = run_default(Scenario::Spectrum);
    let mut checks: Vec<CheckResult> = out.manifest.checks.iter().filter(|c| c.name.contains("L##")).cloned().collect();
    assert_eq!(checks.len(), 2);
    checks.push(runtime(&out, 30.0));
    verdict("L## ground state", &checks);
}

#[test]
fn coercivity() {
    let out = run_default(Scenario::Coercivity);
    let mut checks = out.manifest.checks.clone();
    assert_eq!(checks.len(), 2);
    checks.push(runtime(&out, 60.0));
    verdict("coercivity", &checks);
}

#[test]
fn identity_suite() {
    let out = run_default(Scenario::Identities);
    let mut checks = out.manifest.checks.clone();
    assert_eq!(checks.len(), 8);
    assert_eq!(out.results["ibp"]["pairs"].as_array().map(Vec::len), Some(20));
    checks.push(runtime(&out, 300.0));
    verdict("identity suite", &checks);
}

#[test]
fn kernel_of_fourth_order_operator() {
    let out = run_default(Scenario::Kernel4);
    assert_eq!(out.manifest.checks.len(), 4);
    verdict("kernel functions", &out.manifest.checks);
}

#[test]
fn conservation() {
    let mut cfg = ExperimentConfig::defaults(Scenario::Orbital);
    cfg.grid.half_length = 512.0;
    cfg.grid.n = 4096;
    cfg.scheme = Scheme::Yoshida4;
    cfg.dt = 0.002;
    cfg.t_end = 50.0;
    cfg.delta = 0.01;
    cfg.options.conservation_tolerance = Some(1e-8);
    let out = run(&cfg);
    let mut checks: Vec<CheckResult> = out.manifest.checks.iter().filter(|c| !c.name.starts_with("sup")).cloned().collect();
    assert_eq!(checks.len(), 3);
    // E[H] by grid quadrature as well as by the stored closed form
    let g = Grid::new(50.0, 4096).unwrap();
    let bg = KinkBackground::standard(&g).unwrap();
    let e = energy(&g, &FieldPair::new(bg.h.clone(), vec![0.0; g.len()]));
    checks.push(CheckResult::less("|E[H] by quadrature - 2 sqrt(2)/3|", (e - 2.0 * SQRT_2 / 3.0).abs(), 1e-10, "quadrature"));
    checks.push(CheckResult::less("|kink_energy - quadrature|", (kink_energy() - e).abs(), 1e-10, "quadrature"));
    verdict("conservation", &checks);
}

#[test]
fn vacuum_instability() {
    let out = run_default(Scenario::Vacuum);
    let ks: Vec<f64> = out.manifest.config.options.wavenumbers.clone();
    for k in [0.3, 0.5, 0.7, 1.5] {
        assert!(ks.contains(&k), "{ks:?}");
    }
    verdict("vacuum instability", &out.manifest.checks);
}

#[test]
fn orbital_stability_scaling() {
    let mut checks = Vec::new();
    let mut ratios = Vec::new();
    for delta in [0.02, 0.01, 0.005] {
        let mut cfg = ExperimentConfig::defaults(Scenario::Orbital);
        cfg.delta = delta;
        assert!(cfg.t_end >= 100.0);
        let out = run(&cfg);
        checks.extend(out.manifest.checks.iter().cloned());
        let r = number(&out, "sup_norm_over_delta");
        println!("  delta {delta}: sup |u| / delta = {r:.6}");
        ratios.push(r);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    checks.push(CheckResult::less("(max - min) / min of sup |u| / delta", (hi - lo) / lo, 0.25, "spectra.json:sup_norm_over_delta"));
    verdict("orbital stability scaling", &checks);
}

#[test]
fn local_decay() {
    let mut cumulative = Vec::new();
    let mut checks = Vec::new();
    for delta in [0.01, 0.005] {
        let mut cfg = ExperimentConfig::defaults(Scenario::Decay);
        cfg.delta = delta;
        assert!(cfg.t_end >= 200.0);
        let out = run(&cfg);
        if delta == 0.01 {
            checks.extend(out.manifest.checks.iter().cloned());
        }
        cumulative.push(number(&out, "sech_cumulative"));
    }
    checks.push(CheckResult::at_least("sech cumulative ratio delta 0.01 / 0.005", cumulative[0] / cumulative[1], 2.0, "spectra.json:sech_cumulative"));
    checks.push(CheckResult::at_most("sech cumulative ratio delta 0.01 / 0.005", cumulative[0] / cumulative[1], 8.0, "spectra.json:sech_cumulative"));
    verdict("local decay", &checks);
}

#[test]
fn picard_cross_validation() {
    let cfg = ExperimentConfig::defaults(Scenario::PicardVsStrang);
    assert_eq!(cfg.delta, 0.005);
    assert_eq!(cfg.t_end, 1.0);
    let out = run(&cfg);
    assert_eq!(out.manifest.checks.len(), 2);
    verdict("Picard against splitting", &out.manifest.checks);
}

#[test]
fn multiplier_norms() {
    let out = run_default(Scenario::Multipliers);
    let sharp = out.manifest.checks.iter().filter(|c| c.name.ends_with("- sharp|")).count();
    assert_eq!(sharp, 6);
    verdict("multiplier norms", &out.manifest.checks);
}
