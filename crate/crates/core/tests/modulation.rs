use std::f64::consts::SQRT_2;

use kinklab_core::evolution::{advance, Dynamics, Scheme};
use kinklab_core::model::{kink, kink_prime, kink_second};
use kinklab_core::modulation::{extract_rho, localized_fields, modulate, rho_dot, ShiftedKink};
use kinklab_core::{FieldPair, Grid, KinkBackground, NormKind, ScaleParams, WeightSet};
use proptest::prelude::*;

// sup |ζ_K'/ζ_K|·K over the transition, measured 3.75
const C_ZETA_LOG: f64 = 4.0;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn grid() -> Grid {
    Grid::new(40.0, 1024).unwrap()
}

/// Bisection on `⟨φ₁ - H(· - r), H'(· - r)⟩` on `[lo, hi]` to 1e-15.
fn bisect_oracle(g: &Grid, phi1: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let f = |r: f64| -> f64 {
        g.points().iter().zip(phi1).map(|(&x, &p)| (p - kink(x - r)) * kink_prime(x - r)).sum()
    };
    let flo = f(lo);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn exact_translate() {
    let g = grid();
    let phi = g.sample(|x| kink(x - 0.3));
    let d = extract_rho(&g, &phi, 0.0, 1.0).unwrap();
    assert!((d.rho - 0.3).abs() < 1e-10);
    assert!(g.norm(&d.u1, NormKind::Linf) < 1e-10);
}

#[test]
fn odd_internal_mode_barely_shifts() {
    let g = grid();
    let phi = g.sample(|x| kink(x) + 0.01 * sech(x / SQRT_2) * (x / SQRT_2).tanh());
    let d = extract_rho(&g, &phi, 0.0, 0.1).unwrap();
    assert!(d.rho.abs() < 1e-3);
}

#[test]
fn shifted_kink_with_bump_matches_oracle() {
    let g = grid();
    let phi = g.sample(|x| kink(x - 0.3) + 0.01 * sech(x - 2.0));
    let d = extract_rho(&g, &phi, 0.3, 0.1).unwrap();
    assert!((d.rho - 0.3).abs() < 1e-2);
    let oracle = bisect_oracle(&g, &phi, 0.0, 0.6);
    assert!((d.rho - oracle).abs() < 1e-12, "{} vs {oracle}", d.rho);
    let hp = g.sample(|x| kink_prime(x - d.rho));
    let scale = g.norm(&d.u1, NormKind::L2) * g.norm(&hp, NormKind::L2);
    assert!(d.orthogonality.abs() < 1e-10 * scale);
    assert!(g.inner(&d.u1, &hp).abs() < 1e-12);
}

#[test]
fn outside_tube_is_an_error() {
    let g = grid();
    let phi = g.sample(|x| kink(x - 0.5));
    assert!(extract_rho(&g, &phi, 0.0, 0.1).is_err());
}

#[test]
fn rho_dot_parity_cases() {
    let g = grid();
    let k = ShiftedKink::new(&g, 0.0);
    let u1 = g.sample(|x| 0.01 * sech(x));
    let zero = FieldPair::new(u1.clone(), vec![0.0; g.len()]);
    assert_eq!(rho_dot(&g, &zero, &k).unwrap(), 0.0);
    let even = FieldPair::new(u1, g.sample(|x| 0.02 * (-x * x).exp()));
    assert!(rho_dot(&g, &even, &k).unwrap().abs() < 1e-12);
}

#[test]
fn rho_dot_matches_trajectory() {
    let g = Grid::new(40.0, 512).unwrap();
    let bg = KinkBackground::standard(&g).unwrap();
    let u = FieldPair::new(
        g.sample(|x| 0.01 * (-(x - 0.5).powi(2)).exp() * (1.0 + 0.3 * x)),
        g.sample(|x| 0.005 * (-(x + 0.5).powi(2) / 2.0).exp()),
    );
    let u = advance(&bg, &u, 0.5, 20, Scheme::Yoshida4, Dynamics::Full).unwrap();
    let tau = 1e-3;
    let at = |s: f64| {
        let v = advance(&bg, &u, s, 1, Scheme::Yoshida4, Dynamics::Full).unwrap();
        modulate(&g, &bg.h, &v, 0.0, 0.1).unwrap()
    };
    let fd = (at(tau).rho - at(-tau).rho) / (2.0 * tau);
    let m = modulate(&g, &bg.h, &u, 0.0, 0.1).unwrap();
    assert!(m.rho_dot.abs() > 1e-4);
    assert!(((fd - m.rho_dot) / m.rho_dot).abs() < 1e-4, "{fd} vs {}", m.rho_dot);
}

#[test]
fn localized_field_examples() {
    let g = grid();
    let s = ScaleParams::overridden(0.01, 5.0, 2.0, 0.1).unwrap();
    let ws = WeightSet::build(&g, s, 0.4).unwrap();
    let u = FieldPair::new(g.sample(|x| (x * 0.3).sin()), g.sample(|x| (x * 0.2).cos()));
    // v lives in |y| > 2A
    let far = |x: f64| if (x - 0.4).abs() > 10.0 { 1.0 + x.sin() } else { 0.0 };
    let v = FieldPair::new(g.sample(far), g.sample(far));
    let loc = localized_fields(&u, &v, &ws);
    let i = g.nearest_index(0.4);
    // ζ_A is 1 at the center
    assert_eq!(loc.w1[i], u.first[i]);
    assert_eq!(loc.w2[i], u.second[i]);
    assert!(loc.z1.iter().chain(&loc.z2).all(|z| *z == 0.0));
    let v = FieldPair::new(g.sample(|x| (x * 0.7).cos()), g.sample(|x| (x * 0.1).sin()));
    let loc = localized_fields(&u, &v, &ws);
    assert!(g.norm(&loc.z1, NormKind::L2) <= g.norm(&v.first, NormKind::L2));
    assert!(g.norm(&loc.z2, NormKind::L2) <= g.norm(&v.second, NormKind::L2));
}

#[test]
fn shifted_kink_samples() {
    let g = grid();
    let k = ShiftedKink::new(&g, -0.25);
    for (i, &x) in g.points().iter().enumerate().step_by(37) {
        assert_eq!(k.h[i], kink(x + 0.25));
        assert_eq!(k.hpp[i], kink_second(x + 0.25));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extract_rho_is_equivariant(m in -30i32..30, eps in -0.02..0.02f64) {
        let g = grid();
        let profile = |x: f64| kink(x - 0.1) + eps * sech(x - 1.0) + 0.5 * eps * (-(x + 0.5).powi(2)).exp();
        let s = m as f64 * g.spacing();
        let base = extract_rho(&g, &g.sample(profile), 0.1, 0.1).unwrap();
        let moved = extract_rho(&g, &g.sample(|x| profile(x - s)), 0.1 + s, 0.1).unwrap();
        prop_assert!((moved.rho - base.rho - s).abs() < 1e-10);
    }

    #[test]
    fn localized_derivative_chain(a in prop::collection::vec(-1.0..1.0f64, 5), big_a in 2.0..30.0f64, c in -8.0..8.0f64) {
        let g = Grid::new(60.0, 2048).unwrap();
        let s = ScaleParams::overridden(0.01, big_a, 2.0, 0.1).unwrap();
        let ws = WeightSet::build(&g, s, 0.0).unwrap();
        let u1 = g.sample(|x| {
            a.iter().enumerate().map(|(j, q)| q * ((j as f64 + 1.0) * 0.5 * x).sin()).sum::<f64>()
                * (-((x - c) / 10.0).powi(2)).exp()
        });
        let za = ws.zeta_a.value();
        let du: Vec<f64> = g.derivative(&u1, 1).iter().zip(za).map(|(d, z)| d * z).collect();
        let w1: Vec<f64> = u1.iter().zip(za).map(|(u, z)| u * z).collect();
        let dw = g.derivative(&w1, 1);
        let lhs = g.norm(&du, NormKind::L2);
        let rhs = g.norm(&dw, NormKind::L2) + g.norm(&w1, NormKind::L2) / big_a;
        prop_assert!(lhs <= C_ZETA_LOG * rhs);
    }
}
