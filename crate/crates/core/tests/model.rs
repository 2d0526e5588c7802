use std::f64::consts::SQRT_2;

use kinklab_core::model::{
    energy, energy_expansion_residual, expansion_remainder, kink, kink_energy, kink_prime, momentum, nonlinearity,
    nonlinearity_with, potential, vacuum_dispersion, vacuum_growth_rate,
};
use kinklab_core::{FieldPair, Grid, KinkBackground};
use proptest::prelude::*;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn setup() -> (Grid, KinkBackground) {
    let g = Grid::new(50.0, 1024).unwrap();
    let bg = KinkBackground::standard(&g).unwrap();
    (g, bg)
}

#[test]
fn kink_profile_basics() {
    let (g, bg) = setup();
    assert_eq!(kink(0.0), 0.0);
    assert_eq!(potential(0.0), -1.0);
    let i0 = g.nearest_index(0.0);
    assert_eq!(bg.h[i0], 0.0);
    for (j, &x) in g.points().iter().enumerate().skip(1) {
        // the grid is symmetric about 0 apart from x = -L
        let mirror = g.len() - j;
        assert!((bg.h[j] + bg.h[mirror]).abs() < 1e-15, "x={x}");
    }
    assert!((kink(50.0) - (50.0 / SQRT_2).tanh()).abs() < 1e-16);
    assert!((bg.h[0] + (50.0 / SQRT_2).tanh()).abs() < 1e-16);
}

#[test]
fn kink_ode_residual_small_for_boosts() {
    let g = Grid::new(50.0, 1024).unwrap();
    for c in [0.0, 0.5, 1.0] {
        let bg = KinkBackground::new(&g, c, 5.0).unwrap();
        assert!(bg.ode_residual() < 1e-10, "c={c}: {}", bg.ode_residual());
    }
}

#[test]
fn potential_forms_and_bounds() {
    let (g, bg) = setup();
    for (i, &x) in g.points().iter().enumerate() {
        let alt = 2.0 - 3.0 * sech(x / SQRT_2).powi(2);
        assert!((bg.v0[i] - alt).abs() < 1e-14);
        assert!(bg.v0[i] >= -1.0 - 1e-15 && bg.v0[i] <= 2.0 + 1e-15);
    }
    assert!((potential(50.0) - 2.0).abs() < 1e-12);
    assert!((potential(-50.0) - 2.0).abs() < 1e-12);
}

#[test]
fn nonlinearity_examples() {
    let (g, bg) = setup();
    let zero = vec![0.0; g.len()];
    assert!(nonlinearity(&zero, &bg).iter().all(|v| *v == 0.0));
    // far right, H ≈ 1 but inside the unmollified region
    let f = nonlinearity_with(&[0.1], &[kink(30.0)]);
    assert!((f[0] - 0.031).abs() < 1e-12);
    let eps = 0.01;
    let y1 = |x: f64| sech(x / SQRT_2) * (x / SQRT_2).tanh();
    let u: Vec<f64> = g.sample(|x| eps * y1(x));
    let i0 = g.nearest_index(0.0);
    assert_eq!(nonlinearity(&u, &bg)[i0], 0.0);
}

#[test]
fn kink_energy_and_momentum() {
    let (g, bg) = setup();
    let state = FieldPair::new(bg.h.clone(), vec![0.0; g.len()]);
    let hp2 = g.inner(&bg.hp, &bg.hp);
    let e = energy(&g, &state);
    assert!((e - hp2).abs() < 1e-12);
    assert!((e - 2.0 * SQRT_2 / 3.0).abs() < 1e-10);
    assert!((kink_energy() - 2.0 * SQRT_2 / 3.0).abs() < 1e-10);
    assert_eq!(momentum(&g, &state), 0.0);

    let vac = FieldPair::new(vec![1.0; g.len()], vec![0.0; g.len()]);
    assert!(energy(&g, &vac).abs() < 1e-15);
    assert!(momentum(&g, &vac).abs() < 1e-15);
}

#[test]
fn expansion_remainder_matches_closed_form() {
    let (g, bg) = setup();
    let zero = FieldPair::zeros(g.len());
    assert!(energy_expansion_residual(&bg, &zero).abs() < 1e-15);
    for eps in [0.1, 0.01] {
        let u1 = g.sample(|x| eps * sech(x / SQRT_2));
        let u = FieldPair::new(u1.clone(), g.sample(|x| 0.5 * eps * sech(x)));
        let r = energy_expansion_residual(&bg, &u);
        assert!((r - expansion_remainder(&bg, &u1)).abs() < 1e-10, "eps={eps}");
    }
}

#[test]
fn expansion_remainder_is_cubic() {
    let (g, bg) = setup();
    // off-center so the cubic term ∫H u³ does not vanish by parity
    let shape = |x: f64| sech(x - 1.0);
    let ratio = |eps: f64| {
        let u = FieldPair::new(g.sample(|x| eps * shape(x)), vec![0.0; g.len()]);
        energy_expansion_residual(&bg, &u) / eps.powi(3)
    };
    let (a, b) = (ratio(1e-2), ratio(1e-3));
    assert!(((a - b) / b).abs() < 0.01, "{a} vs {b}");
    // leading coefficient is ∫H u³
    let u3: Vec<f64> = g.points().iter().map(|&x| kink(x) * shape(x).powi(3)).collect();
    assert!(((b - g.integrate(&u3)) / b).abs() < 1e-2);
}

#[test]
fn vacuum_dispersion_examples() {
    let w = vacuum_dispersion(0.0);
    assert_eq!(w[0].norm(), 0.0);
    assert_eq!(w[1].norm(), 0.0);
    let w = vacuum_dispersion(2.0);
    assert!((w[0].re - 2.0 * 3f64.sqrt()).abs() < 1e-14 && w[0].im == 0.0);
    assert!((w[1].re + 2.0 * 3f64.sqrt()).abs() < 1e-14);
    assert!((vacuum_growth_rate(0.5) - 3f64.sqrt() / 4.0).abs() < 1e-15);
    assert!((vacuum_growth_rate(0.5) - 0.433013).abs() < 1e-6);
    assert_eq!(vacuum_growth_rate(1.5), 0.0);
}

fn perturbation(x: f64) -> (f64, f64) {
    (0.05 * (-(x - 0.7).powi(2)).exp() * (1.0 + 0.2 * x), 0.03 * sech(x + 0.4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nonlinearity_parity_defect(vals in prop::collection::vec(-0.5..0.5f64, 64), hs in prop::collection::vec(-1.0..1.0f64, 64)) {
        let neg: Vec<f64> = vals.iter().map(|v| -v).collect();
        let fp = nonlinearity_with(&vals, &hs);
        let fm = nonlinearity_with(&neg, &hs);
        for i in 0..64 {
            let expect = 6.0 * hs[i] * vals[i] * vals[i];
            prop_assert!((fp[i] + fm[i] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn energy_and_momentum_are_translation_invariant(m in -20i32..20) {
        let (g, _) = setup();
        let shift = m as f64 * g.spacing();
        let build = |s: f64| {
            let first = g.sample(|x| kink(x - s) + perturbation(x - s).0);
            let second = g.sample(|x| perturbation(x - s).1);
            FieldPair::new(first, second)
        };
        let (a, b) = (build(0.0), build(shift));
        let (ea, eb) = (energy(&g, &a), energy(&g, &b));
        let (pa, pb) = (momentum(&g, &a), momentum(&g, &b));
        prop_assert!((ea - eb).abs() < 1e-12 * ea.abs());
        prop_assert!((pa - pb).abs() < 1e-12 * pa.abs().max(1e-3));
    }
}

#[test]
fn kink_derivative_matches_spectral() {
    let g = Grid::new(30.0, 512).unwrap();
    // H' is smooth and decays, so collocation differentiates it to round-off
    let hp = g.sample(kink_prime);
    let d = g.derivative(&hp, 1);
    let exact = g.sample(kinklab_core::model::kink_second);
    let err = d.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10);
}
