//! Kink shift `ρ(t)` fixed by `⟨φ₁ - H(· - ρ), H'(· - ρ)⟩ = 0`, its
//! velocity, and the localized variables built from the weights.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, NormKind};
use crate::model::{kink, kink_prime, kink_second, potential, potential_prime, potential_second, FieldPair};
use crate::weights::WeightSet;

pub const DEFAULT_TUBE_RADIUS: f64 = 0.1;
const MAX_NEWTON: usize = 50;

/// Kink and potential samples at `y = x - ρ`.
#[derive(Clone, Debug)]
pub struct ShiftedKink {
    pub rho: f64,
    pub h: Vec<f64>,
    pub hp: Vec<f64>,
    pub hpp: Vec<f64>,
    pub v0: Vec<f64>,
    pub v0p: Vec<f64>,
    pub v0pp: Vec<f64>,
}

impl ShiftedKink {
    pub fn new(grid: &Grid, rho: f64) -> Self {
        let s = |f: fn(f64) -> f64| grid.sample(|x| f(x - rho));
        ShiftedKink {
            rho,
            h: s(kink),
            hp: s(kink_prime),
            hpp: s(kink_second),
            v0: s(potential),
            v0p: s(potential_prime),
            v0pp: s(potential_second),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub rho: f64,
    #[serde(skip)]
    pub u1: Vec<f64>,
    /// `⟨u₁, H'(· - ρ)⟩`.
    pub orthogonality: f64,
    pub iterations: usize,
}

/// `g(ρ)` and `g'(ρ)`.
fn g_and_slope(grid: &Grid, phi1: &[f64], rho: f64) -> (f64, f64) {
    let h = grid.spacing();
    let (mut g, mut dg) = (0.0, 0.0);
    for (&x, &p) in grid.points().iter().zip(phi1) {
        let y = x - rho;
        let u = p - kink(y);
        let hp = kink_prime(y);
        g += u * hp;
        dg += hp * hp - u * kink_second(y);
    }
    (h * g, h * dg)
}

/// Newton iteration for the shift, with a bisection fallback on
/// `[guess - 1, guess + 1]`.
pub fn extract_rho(grid: &Grid, phi1: &[f64], guess: f64, tube_radius: f64) -> Result<Decomposition> {
    grid.check(phi1)?;
    let diff: Vec<f64> = grid.points().iter().zip(phi1).map(|(&x, &p)| p - kink(x - guess)).collect();
    let dist = grid.norm(&diff, NormKind::H1);
    if dist > tube_radius {
        return Err(Error::OutsideTube { distance: dist, radius: tube_radius });
    }
    let (lo0, hi0) = (guess - 1.0, guess + 1.0);
    let mut rho = guess;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..MAX_NEWTON {
        iterations = it + 1;
        let (g, dg) = g_and_slope(grid, phi1, rho);
        if g == 0.0 {
            converged = true;
            break;
        }
        let step = g / dg;
        let next = rho + step;
        if !(dg > 0.0) || !(lo0..=hi0).contains(&next) {
            rho = bisect(grid, phi1, lo0, hi0)?;
            converged = true;
            break;
        }
        rho = next;
        if step.abs() <= 1e-15 * (1.0 + rho.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "shift extraction", iterations: MAX_NEWTON });
    }
    let u1: Vec<f64> = grid.points().iter().zip(phi1).map(|(&x, &p)| p - kink(x - rho)).collect();
    let hp = grid.sample(|x| kink_prime(x - rho));
    let orthogonality = grid.inner(&u1, &hp);
    Ok(Decomposition { rho, u1, orthogonality, iterations })
}

fn bisect(grid: &Grid, phi1: &[f64], mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut glo = g_and_slope(grid, phi1, lo).0;
    let ghi = g_and_slope(grid, phi1, hi).0;
    if glo * ghi > 0.0 {
        return Err(Error::NoConvergence { what: "shift bracketing", iterations: 0 });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g_and_slope(grid, phi1, mid).0;
        if gm * glo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ρ' = ⟨u₂, H''⟩ / (|H'|² - ⟨u₁, H''⟩)`, all at `y = x - ρ`.
pub fn rho_dot(grid: &Grid, u: &FieldPair, kink: &ShiftedKink) -> Result<f64> {
    let hp2 = grid.inner(&kink.hp, &kink.hp);
    let den = hp2 - grid.inner(&u.first, &kink.hpp);
    if den.abs() < 1e-3 * hp2 {
        return Err(Error::Degenerate { what: "shift velocity", value: den });
    }
    Ok(grid.inner(&u.second, &kink.hpp) / den)
}

/// Modulated perturbation of a simulated state `(H + u_sim)` around
/// `H(· - ρ)`, with `ρ` and `ρ'`.
#[derive(Clone, Debug)]
pub struct Modulated {
    pub rho: f64,
    pub rho_dot: f64,
    pub u: FieldPair,
    pub kink: ShiftedKink,
    pub orthogonality: f64,
}

pub fn modulate(grid: &Grid, h: &[f64], u_sim: &FieldPair, guess: f64, tube_radius: f64) -> Result<Modulated> {
    let phi1: Vec<f64> = h.iter().zip(&u_sim.first).map(|(a, b)| a + b).collect();
    let dec = extract_rho(grid, &phi1, guess, tube_radius)?;
    let kink = ShiftedKink::new(grid, dec.rho);
    let u = FieldPair::new(dec.u1, u_sim.second.clone());
    let rd = rho_dot(grid, &u, &kink)?;
    Ok(Modulated { rho: dec.rho, rho_dot: rd, u, kink, orthogonality: dec.orthogonality })
}

/// `w_i = ζ_A u_i`, `z_i = χ_A ζ_B v_i`.
#[derive(Clone, Debug)]
pub struct Localized {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
}

pub fn localized_fields(u: &FieldPair, v: &FieldPair, ws: &WeightSet) -> Localized {
    let za = ws.zeta_a.value();
    let cz: Vec<f64> = ws.chi_a.value().iter().zip(ws.zeta_b.value()).map(|(a, b)| a * b).collect();
    let mul = |w: &[f64], f: &[f64]| w.iter().zip(f).map(|(a, b)| a * b).collect::<Vec<f64>>();
    Localized {
        w1: mul(za, &u.first),
        w2: mul(za, &u.second),
        z1: mul(&cz, &v.first),
        z2: mul(&cz, &v.second),
    }
}
