//! Kink profiles, the potential `V0`, the nonlinearity, conserved
//! quantities and the vacuum dispersion relation.

use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::jet::Jet;
use crate::weights::transition;

/// `H(x) = tanh(x / sqrt 2)`.
pub fn kink(x: f64) -> f64 {
    (x / SQRT_2).tanh()
}

pub fn kink_prime(x: f64) -> f64 {
    let s = 1.0 / (x / SQRT_2).cosh();
    s * s / SQRT_2
}

pub fn kink_second(x: f64) -> f64 {
    let h = kink(x);
    h * h * h - h
}

pub fn kink_third(x: f64) -> f64 {
    let h = kink(x);
    let s = 1.0 - h * h;
    s * (2.0 * h * h - s) / SQRT_2
}

/// Jet of `H` at `x`.
pub fn kink_jet(x: f64) -> Jet {
    Jet::var(x).scale(1.0 / SQRT_2).tanh()
}

/// `V0 = -1 + 3 H^2 = 2 - 3 sech^2(x / sqrt 2)`.
pub fn potential(x: f64) -> f64 {
    let s = 1.0 / (x / SQRT_2).cosh();
    2.0 - 3.0 * s * s
}

pub fn potential_prime(x: f64) -> f64 {
    let h = kink(x);
    3.0 * SQRT_2 * h * (1.0 - h * h)
}

pub fn potential_second(x: f64) -> f64 {
    let h = kink(x);
    let s = 1.0 - h * h;
    3.0 * s * s - 6.0 * h * h * s
}

/// Jet of `V0` at `x`.
pub fn potential_jet(x: f64) -> Jet {
    let h = kink_jet(x);
    Jet::constant(-1.0) + h.square().scale(3.0)
}

/// Lorentz family `H_c(x) = sigma H(sigma x)` with `sigma = sqrt(1 + c^2)`.
pub fn boosted_kink(c: f64, x: f64) -> f64 {
    let sigma = (1.0 + c * c).sqrt();
    sigma * kink(sigma * x)
}

/// Two-component state or perturbation on one grid.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldPair {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl FieldPair {
    pub fn new(first: Vec<f64>, second: Vec<f64>) -> Self {
        assert_eq!(first.len(), second.len(), "components must share a grid");
        FieldPair { first, second }
    }

    pub fn zeros(n: usize) -> Self {
        FieldPair { first: vec![0.0; n], second: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        FieldPair {
            first: self.first.iter().map(|v| v * s).collect(),
            second: self.second.iter().map(|v| v * s).collect(),
        }
    }

    pub fn axpy(&mut self, a: f64, other: &FieldPair) {
        for (u, v) in self.first.iter_mut().zip(&other.first) {
            *u += a * v;
        }
        for (u, v) in self.second.iter_mut().zip(&other.second) {
            *u += a * v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.first.iter().chain(&self.second).all(|v| v.is_finite())
    }

    pub fn norm_h1l2(&self, grid: &Grid) -> f64 {
        grid.norm_h1l2(&self.first, &self.second)
    }
}

/// Kink samples on a grid, plus a periodized copy for time stepping.
#[derive(Clone, Debug)]
pub struct KinkBackground {
    pub grid: Grid,
    pub c: f64,
    pub sigma: f64,
    pub h: Vec<f64>,
    pub hp: Vec<f64>,
    pub hpp: Vec<f64>,
    pub v0: Vec<f64>,
    pub h_moll: Vec<f64>,
    pub width: f64,
}

pub const DEFAULT_MOLLIFICATION_WIDTH: f64 = 5.0;

impl KinkBackground {
    pub fn new(grid: &Grid, c: f64, width: f64) -> Result<Self> {
        let l = grid.half_length();
        if !c.is_finite() {
            return Err(invalid("c", "must be finite"));
        }
        if !(width > 0.0 && width < l / 4.0) {
            return Err(invalid("W", format!("must lie in (0, L/4), got {width}")));
        }
        let sigma = (1.0 + c * c).sqrt();
        let hk = |x: f64| sigma * kink(sigma * x);
        let h = grid.sample(hk);
        let hp = grid.sample(|x| sigma * sigma * kink_prime(sigma * x));
        let hpp = grid.sample(|x| sigma.powi(3) * kink_second(sigma * x));
        let v0 = h.iter().map(|v| -1.0 + 3.0 * v * v).collect();
        // Blend into an antikink sitting on the seam, so the copy is periodic
        // and its linearization stays stable away from the core.
        let h_moll = grid.sample(|x| {
            let beta = transition((x.abs() - (l - 2.0 * width)) / width);
            if beta == 0.0 {
                return hk(x);
            }
            let d = if x >= 0.0 { x - l } else { x + l };
            (1.0 - beta) * hk(x) - beta * hk(d)
        });
        Ok(KinkBackground { grid: grid.clone(), c, sigma, h, hp, hpp, v0, h_moll, width })
    }

    pub fn standard(grid: &Grid) -> Result<Self> {
        Self::new(grid, 0.0, DEFAULT_MOLLIFICATION_WIDTH.min(grid.half_length() / 5.0))
    }

    /// Max-norm residual of `H'' + (1 + c^2) H - H^3`.
    pub fn ode_residual(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.h
            .iter()
            .zip(&self.hpp)
            .map(|(h, hpp)| (hpp + s2 * h - h * h * h).abs())
            .fold(0.0, f64::max)
    }
}

/// `F = 3 u1 (H^2 - 1) + u1^2 (u1 + 3 H)` with `H` supplied pointwise.
pub fn nonlinearity_with(u1: &[f64], h: &[f64]) -> Vec<f64> {
    u1.iter()
        .zip(h)
        .map(|(&u, &h)| 3.0 * u * (h * h - 1.0) + u * u * (u + 3.0 * h))
        .collect()
}

/// Nonlinearity evaluated on the periodized background.
pub fn nonlinearity(u1: &[f64], bg: &KinkBackground) -> Vec<f64> {
    nonlinearity_with(u1, &bg.h_moll)
}

/// Spatial derivative of a state whose first component tends to
/// constants at both ends: a tanh step carries the jump analytically.
fn state_derivative(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let a = f[0];
    let b = f[f.len() - 1];
    let mid = 0.5 * (a + b);
    let amp = 0.5 * (b - a);
    let rest: Vec<f64> = grid
        .points()
        .iter()
        .zip(f)
        .map(|(&x, &v)| v - mid - amp * kink(x))
        .collect();
    let mut d = grid.derivative(&rest, 1);
    for (dv, &x) in d.iter_mut().zip(grid.points()) {
        *dv += amp * kink_prime(x);
    }
    d
}

/// `E = 1/2 ∫ (∂φ1)^2 + φ2^2 + 1/2 (φ1^2 - 1)^2`.
pub fn energy(grid: &Grid, state: &FieldPair) -> f64 {
    let d = state_derivative(grid, &state.first);
    let dens: Vec<f64> = d
        .iter()
        .zip(&state.first)
        .zip(&state.second)
        .map(|((dp, p1), p2)| {
            let w = p1 * p1 - 1.0;
            0.5 * (dp * dp + p2 * p2 + 0.5 * w * w)
        })
        .collect();
    grid.integrate(&dens)
}

/// `P = ∫ φ1 φ2`. The tanh step carrying the jump of `φ1` is paired with
/// `φ2` after integrating by parts, `∫ H φ2 = H(L) Φ2(L) - ∫ H' Φ2`, so the
/// seam does not leak into the quadrature.
pub fn momentum(grid: &Grid, state: &FieldPair) -> f64 {
    let f = &state.first;
    let (a, b) = (f[0], f[f.len() - 1]);
    let (mid, amp) = (0.5 * (a + b), 0.5 * (b - a));
    let rest: Vec<f64> = grid.points().iter().zip(f).map(|(&x, &v)| v - mid - amp * kink(x)).collect();
    let anti = grid.antiderivative(&state.second);
    let total = grid.integrate(&state.second);
    let hp = grid.sample(kink_prime);
    let step = kink(grid.half_length()) * total - grid.inner(&hp, &anti);
    grid.inner(&rest, &state.second) + mid * total + amp * step
}

/// `E[H]` by adaptive quadrature on `[-60, 60]`; equals `|H'|^2 = 2√2/3`.
pub fn kink_energy() -> f64 {
    let dens = |x: f64| {
        let h = kink(x);
        let w = h * h - 1.0;
        0.5 * kink_prime(x).powi(2) + 0.25 * w * w
    };
    crate::quad::adaptive(&dens, -60.0, 60.0, 1e-15)
}

/// Full state `(H + u1, u2)` built on the exact kink.
pub fn full_state(bg: &KinkBackground, u: &FieldPair) -> FieldPair {
    FieldPair {
        first: bg.h.iter().zip(&u.first).map(|(h, v)| h + v).collect(),
        second: u.second.clone(),
    }
}

/// Periodic full state `(H_moll + u1, u2)` that the stepper actually evolves.
pub fn periodized_state(bg: &KinkBackground, u: &FieldPair) -> FieldPair {
    FieldPair {
        first: bg.h_moll.iter().zip(&u.first).map(|(h, v)| h + v).collect(),
        second: u.second.clone(),
    }
}

/// `∫ φ1 φ2` for a periodic state: the momentum conserved by the periodized
/// flow up to the gluing region of the background.
pub fn periodic_momentum(grid: &Grid, state: &FieldPair) -> f64 {
    grid.inner(&state.first, &state.second)
}

/// `⟨ℒ f, f⟩` with the exact potential.
pub fn quadratic_form(bg: &KinkBackground, f: &[f64]) -> f64 {
    let g = &bg.grid;
    let d = g.derivative(f, 1);
    g.inner(&d, &d) + g.inner_weighted(&bg.v0, f, f)
}

/// `E[H + u] - E[H] - 1/2 (|u2|^2 + ⟨ℒ u1, u1⟩)`.
pub fn energy_expansion_residual(bg: &KinkBackground, u: &FieldPair) -> f64 {
    let g = &bg.grid;
    let e_pert = energy(g, &full_state(bg, u));
    let e_kink = energy(g, &FieldPair::new(bg.h.clone(), vec![0.0; g.len()]));
    e_pert - e_kink - 0.5 * (g.inner(&u.second, &u.second) + quadratic_form(bg, &u.first))
}

/// Closed form `1/4 ∫ u1^3 (u1 + 4 H)` of the expansion remainder.
pub fn expansion_remainder(bg: &KinkBackground, u1: &[f64]) -> f64 {
    let dens: Vec<f64> = u1.iter().zip(&bg.h).map(|(u, h)| u * u * u * (u + 4.0 * h)).collect();
    0.25 * bg.grid.integrate(&dens)
}

/// Frequencies `±|k| sqrt(k^2 - 1)` of plane waves around `φ = 0`;
/// imaginary for `|k| < 1`.
pub fn vacuum_dispersion(k: f64) -> [Complex64; 2] {
    let s = k * k - 1.0;
    let w = if s >= 0.0 {
        Complex64::new(k.abs() * s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, k.abs() * (-s).sqrt())
    };
    [w, -w]
}

/// Growth rate `|k| sqrt(1 - k^2)`, zero outside `|k| < 1`.
pub fn vacuum_growth_rate(k: f64) -> f64 {
    vacuum_dispersion(k)[0].im.abs()
}
