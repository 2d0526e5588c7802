use std::f64::consts::PI;

use kinklab_core::{Grid, NormKind};
use proptest::prelude::*;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random smooth periodic field: a handful of resolved modes.
fn field(grid: &Grid, coeffs: &[(f64, f64)]) -> Vec<f64> {
    let l = grid.half_length();
    grid.sample(|x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let k = PI * (j + 1) as f64 / l;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum::<f64>()
            + 0.3
    })
}

#[test]
fn spacing_matches_length() {
    let g = Grid::new(PI, 16).unwrap();
    assert!((g.spacing() - PI / 8.0).abs() < 1e-15);
    let g = Grid::new(10.0, 16).unwrap();
    assert!((g.spacing() * 16.0 - 20.0).abs() < 1e-14);
    let xi = g.wavenumbers_sorted();
    for (i, v) in xi.iter().enumerate() {
        let j = i as f64 - 8.0;
        assert!((v - PI / 10.0 * j).abs() < 1e-14);
    }
}

#[test]
fn odd_or_tiny_sizes_rejected() {
    assert!(Grid::new(10.0, 7).is_err());
    assert!(Grid::new(10.0, 4).is_err());
    assert!(Grid::new(f64::NAN, 64).is_err());
}

#[test]
fn derivative_of_resolved_sine() {
    let g = Grid::new(10.0, 128).unwrap();
    let k = 3.0 * PI / 10.0;
    let f = g.sample(|x| (k * x).sin());
    let d = g.derivative(&f, 1);
    let exact = g.sample(|x| k * (k * x).cos());
    assert!(max_diff(&d, &exact) < 1e-10);
}

#[test]
fn derivative_of_constant_vanishes() {
    let g = Grid::new(5.0, 64).unwrap();
    let f = vec![2.5; 64];
    for order in 1..=4 {
        assert!(g.derivative(&f, order).iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn second_derivative_of_gaussian() {
    let g = Grid::new(20.0, 256).unwrap();
    let f = g.sample(|x| (-x * x).exp());
    let d2 = g.derivative(&f, 2);
    let exact = g.sample(|x| (4.0 * x * x - 2.0) * (-x * x).exp());
    assert!(max_diff(&d2, &exact) < 1e-9);
}

#[test]
fn quadrature_examples() {
    let g = Grid::new(3.0, 64).unwrap();
    assert!((g.integrate(&vec![1.0; 64]) - 6.0).abs() < 1e-13);
    let s = g.sample(|x| (PI * x / 3.0).sin());
    assert!(g.integrate(&s).abs() < 1e-12);

    let g = Grid::new(20.0, 512).unwrap();
    let f = g.sample(|x| 1.0 / (x / 2f64.sqrt()).cosh().powi(2));
    assert!((g.integrate(&f) - 2.0 * 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn norms_of_sine() {
    let g = Grid::new(PI, 64).unwrap();
    let z = vec![0.0; 64];
    for kind in [NormKind::L2, NormKind::H1, NormKind::Linf] {
        assert_eq!(g.norm(&z, kind), 0.0);
    }
    assert_eq!(g.norm_h1l2(&z, &z), 0.0);
    let f = g.sample(f64::sin);
    assert!((g.norm(&f, NormKind::L2) - PI.sqrt()).abs() < 1e-12);
    assert!((g.norm(&f, NormKind::H1) - (2.0 * PI).sqrt()).abs() < 1e-12);
}

#[test]
fn antiderivative_inverts_derivative() {
    let g = Grid::new(8.0, 128).unwrap();
    let f = g.sample(|x| (-(x - 1.0).powi(2)).exp());
    let big = g.antiderivative(&f);
    // strip the ramp from the mean, which is not periodic
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let periodic: Vec<f64> = big.iter().zip(g.points()).map(|(v, x)| v - mean * (x + 8.0)).collect();
    let back = g.derivative(&periodic, 1);
    let centered: Vec<f64> = f.iter().map(|v| v - mean).collect();
    assert!(max_diff(&back, &centered) < 1e-12);
    assert!((big[127] + g.spacing() * f[127] - g.integrate(&f)).abs() < 1e-9);
    assert!(big[0].abs() < 1e-14);
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_is_linear(a in coeffs(), b in coeffs(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let g = Grid::new(6.0, 64).unwrap();
        let (f, h) = (field(&g, &a), field(&g, &b));
        let comb: Vec<f64> = f.iter().zip(&h).map(|(x, y)| s * x + t * y).collect();
        let lhs = g.derivative(&comb, 1);
        let (df, dh) = (g.derivative(&f, 1), g.derivative(&h, 1));
        let rhs: Vec<f64> = df.iter().zip(&dh).map(|(x, y)| s * x + t * y).collect();
        let scale = 1.0 + g.norm(&rhs, NormKind::Linf);
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12 * scale);
    }

    #[test]
    fn derivative_integrates_to_zero(a in coeffs()) {
        let g = Grid::new(6.0, 64).unwrap();
        let f = field(&g, &a);
        let d = g.derivative(&f, 1);
        prop_assert!(g.integrate(&d).abs() < 1e-12 * g.norm(&f, NormKind::L2).max(1.0));
    }

    #[test]
    fn derivative_is_antisymmetric(a in coeffs(), b in coeffs()) {
        let g = Grid::new(6.0, 64).unwrap();
        let (f, h) = (field(&g, &a), field(&g, &b));
        let lhs = g.inner(&g.derivative(&f, 1), &h);
        let rhs = -g.inner(&f, &g.derivative(&h, 1));
        let scale = g.norm(&f, NormKind::H1) * g.norm(&h, NormKind::H1);
        prop_assert!((lhs - rhs).abs() < 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn parseval_holds(vals in prop::collection::vec(-1.0..1.0f64, 32)) {
        let g = Grid::new(4.0, 32).unwrap();
        let phys = g.inner(&vals, &vals);
        prop_assert!((phys - g.parseval(&vals)).abs() <= 1e-10 * phys.max(1e-300));
    }

    #[test]
    fn odd_derivatives_stay_real_and_kill_nyquist(vals in prop::collection::vec(-1.0..1.0f64, 32)) {
        let g = Grid::new(4.0, 32).unwrap();
        let d = g.derivative(&vals, 1);
        let spec = g.forward(&d);
        prop_assert!(spec[g.nyquist_index()].norm() < 1e-12);
        prop_assert!(d.iter().all(|v| v.is_finite()));
    }
}
