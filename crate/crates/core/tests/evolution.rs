use std::f64::consts::PI;

use kinklab_core::evolution::{
    advance, evolve, linear_invariant, linear_step, picard_solve, strang_step, vacuum_growth, Dynamics, EvolveOptions,
    PicardOptions, PropagatorTable, Scheme,
};
use kinklab_core::{FieldPair, Grid, KinkBackground};
use proptest::prelude::*;

fn small() -> (Grid, KinkBackground) {
    let g = Grid::new(40.0, 256).unwrap();
    let bg = KinkBackground::standard(&g).unwrap();
    (g, bg)
}

fn bump_state(g: &Grid, eps: f64) -> FieldPair {
    FieldPair::new(
        g.sample(|x| eps * (-(x - 0.5).powi(2)).exp() * (1.0 + 0.3 * x)),
        g.sample(|x| eps * 0.5 * (-(x + 0.5).powi(2) / 2.0).exp()),
    )
}

fn distance(g: &Grid, a: &FieldPair, b: &FieldPair) -> f64 {
    let d1: Vec<f64> = a.first.iter().zip(&b.first).map(|(x, y)| x - y).collect();
    let d2: Vec<f64> = a.second.iter().zip(&b.second).map(|(x, y)| x - y).collect();
    g.norm_h1l2(&d1, &d2)
}

#[test]
fn propagator_is_unimodular() {
    let (g, _) = small();
    for dt in [0.01, 0.5, 3.0] {
        let t = PropagatorTable::new(&g, dt, 2.0);
        for k in 0..g.len() {
            assert!((t.determinant(k) - 1.0).abs() < 1e-12, "dt={dt} k={k}");
        }
        // ω = 0 uses the limit sin(ωt)/ω -> t
        assert_eq!(t.c[0], 1.0);
    }
}

#[test]
fn single_mode_rotates() {
    let (g, _) = small();
    let k = 5.0 * PI / 40.0;
    let w = k * (k * k + 2.0).sqrt();
    let dt = 0.37;
    let u = FieldPair::new(g.sample(|x| (k * x).cos()), vec![0.0; g.len()]);
    let v = linear_step(&g, &u, &PropagatorTable::new(&g, dt, 2.0)).unwrap();
    for (a, &x) in v.first.iter().zip(g.points()) {
        assert!((a - (w * dt).cos() * (k * x).cos()).abs() < 1e-12);
    }
    let z = linear_step(&g, &FieldPair::zeros(g.len()), &PropagatorTable::new(&g, dt, 2.0)).unwrap();
    assert!(z.first.iter().chain(&z.second).all(|v| *v == 0.0));
}

#[test]
fn free_strang_is_the_linear_step() {
    let (g, bg) = small();
    let u = bump_state(&g, 0.1);
    let t = PropagatorTable::new(&g, 0.05, 2.0);
    let a = strang_step(&u, &t, &bg, Dynamics::Free);
    let b = linear_step(&g, &u, &t).unwrap();
    assert_eq!(a, b);
}

#[test]
fn strang_is_second_order() {
    let (g, bg) = small();
    let u = bump_state(&g, 0.05);
    let t_end = 1.0;
    let run = |dt: f64| advance(&bg, &u, t_end, (t_end / dt).round() as usize, Scheme::Strang, Dynamics::Full).unwrap();
    let dts = [0.1, 0.05, 0.025];
    let reference = run(dts[2] / 8.0);
    let errs: Vec<f64> = dts.iter().map(|&dt| distance(&g, &run(dt), &reference)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.3, "{errs:?}");
    }
}

#[test]
fn yoshida_beats_strang_order() {
    let (g, bg) = small();
    let u = bump_state(&g, 0.05);
    let run = |dt: f64| advance(&bg, &u, 1.0, (1.0 / dt).round() as usize, Scheme::Yoshida4, Dynamics::Full).unwrap();
    let reference = run(0.0125 / 4.0);
    let e1 = distance(&g, &run(0.05), &reference);
    let e2 = distance(&g, &run(0.025), &reference);
    assert!(e1 / e2 > 12.0, "{e1} {e2}");
}

#[test]
fn zero_initial_data_stays_zero() {
    let (g, bg) = small();
    let mut norms = Vec::new();
    let opts = EvolveOptions { sample_every: 0.5, ..Default::default() };
    let tr = evolve(&FieldPair::zeros(g.len()), 3.0, &bg, &opts, |_, u| {
        norms.push(u.norm_h1l2(&g));
        Ok(())
    })
    .unwrap();
    assert!(norms.iter().all(|n| *n == 0.0));
    assert_eq!(norms.len(), 7);
    assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn time_reversal() {
    let (g, bg) = small();
    let u = bump_state(&g, 0.05);
    let fwd = advance(&bg, &u, 2.0, 80, Scheme::Strang, Dynamics::Full).unwrap();
    let flip = |v: &FieldPair| FieldPair::new(v.first.clone(), v.second.iter().map(|a| -a).collect());
    let back = flip(&advance(&bg, &flip(&fwd), 2.0, 80, Scheme::Strang, Dynamics::Full).unwrap());
    assert!(distance(&g, &back, &u) < 1e-6);
}

#[test]
fn linearized_quadratic_energy_is_conserved() {
    let g = Grid::new(60.0, 512).unwrap();
    let bg = KinkBackground::standard(&g).unwrap();
    let v0: Vec<f64> = bg.h_moll.iter().map(|h| -1.0 + 3.0 * h * h).collect();
    let q = |u: &FieldPair| {
        let d = g.derivative(&u.first, 1);
        0.5 * (g.inner(&u.second, &u.second) + g.inner(&d, &d) + g.inner_weighted(&v0, &u.first, &u.first))
    };
    let u0 = bump_state(&g, 0.01);
    let q0 = q(&u0);
    let opts = EvolveOptions {
        dt: 0.005,
        scheme: Scheme::Yoshida4,
        dynamics: Dynamics::Linearized,
        sample_every: 5.0,
        boundary_threshold: f64::INFINITY,
        ..Default::default()
    };
    let mut drift = 0.0f64;
    evolve(&u0, 50.0, &bg, &opts, |_, u| {
        drift = drift.max((q(u) - q0).abs() / q0);
        Ok(())
    })
    .unwrap();
    assert!(drift < 1e-8, "{drift}");
}

#[test]
fn picard_without_forcing_is_the_free_flow() {
    let (g, bg) = small();
    let u = bump_state(&g, 0.1);
    let opts = PicardOptions { dynamics: Dynamics::Free, subintervals: 20, ..Default::default() };
    let rep = picard_solve(&u, 1.0, &bg, &opts).unwrap();
    let exact = linear_step(&g, &u, &PropagatorTable::new(&g, 1.0, 2.0)).unwrap();
    assert!(distance(&g, &rep.final_state, &exact) < 1e-10);
    assert!(rep.differences.first().map_or(true, |d| *d < 1e-12), "{:?}", rep.differences);
}

#[test]
fn vacuum_rates() {
    let r = vacuum_growth(0.5, 40.0).unwrap();
    assert!((r.measured_rate - 3f64.sqrt() / 4.0).abs() < 0.01 * 3f64.sqrt() / 4.0);
    let r = vacuum_growth(0.99, 40.0).unwrap();
    assert!(r.measured_rate < 0.15);
    let r = vacuum_growth(1.5, 40.0).unwrap();
    assert!(r.max_amplitude_ratio <= 1.0 + 1e-6);
    assert!((r.measured_frequency - 1.5 * 1.25f64.sqrt()).abs() < 0.01 * 1.677);
    assert!(vacuum_growth(0.123_456, 10.0).is_err());
}

#[test]
fn evolve_rejects_bad_steps() {
    let (g, bg) = small();
    let u = FieldPair::zeros(g.len());
    let opts = EvolveOptions { dt: 0.0, ..Default::default() };
    assert!(evolve(&u, 1.0, &bg, &opts, |_, _| Ok(())).is_err());
    assert!(evolve(&u, f64::NAN, &bg, &EvolveOptions::default(), |_, _| Ok(())).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linear_step_is_invertible_and_conservative(
        a in prop::collection::vec(-1.0..1.0f64, 64),
        b in prop::collection::vec(-1.0..1.0f64, 64),
        dt in 0.001..2.0f64,
    ) {
        let g = Grid::new(10.0, 64).unwrap();
        // drop the Nyquist content, which the flow leaves untouched but
        // differentiation ignores
        let smooth = |v: &[f64]| {
            let mut s = g.forward(v);
            s[g.nyquist_index()] = Default::default();
            g.inverse(s)
        };
        let u = FieldPair::new(smooth(&a), smooth(&b));
        let fwd = linear_step(&g, &u, &PropagatorTable::new(&g, dt, 2.0)).unwrap();
        let back = linear_step(&g, &fwd, &PropagatorTable::new(&g, -dt, 2.0)).unwrap();
        let err = u.first.iter().chain(&u.second).zip(back.first.iter().chain(&back.second))
            .map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        let (i0, i1) = (linear_invariant(&g, &u, 2.0), linear_invariant(&g, &fwd, 2.0));
        prop_assert!((i0 - i1).abs() < 1e-12 * i0);
    }
}
