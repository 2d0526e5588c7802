//! Virial functionals `I, J, M, N`, the combination `𝓗`, the decay
//! functionals, and checks of their exact time-derivative identities.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evolution::{advance, Dynamics, Scheme};
use crate::grid::{Grid, NormKind};
use crate::model::{energy, full_state, periodic_momentum, periodized_state, FieldPair, KinkBackground};
use crate::modulation::{localized_fields, modulate, Modulated, ShiftedKink};
use crate::operators::{apply_l_with, smoothing_apply};
use crate::weights::{ScaleParams, WeightSet};

/// Constants of the combined functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Default for FunctionalConstants {
    fn default() -> Self {
        FunctionalConstants { c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0 }
    }
}

impl FunctionalConstants {
    /// Coefficients of `I`, `N` and `M` in `𝓗 = J + a I + b N + c M`.
    pub fn coefficients(&self, delta: f64) -> (f64, f64, f64) {
        (
            16.0 * self.c2 * delta.powf(0.1),
            -32.0 * self.c2 * self.c1 * delta.sqrt(),
            80.0 * self.c1 * self.c2 * self.c4 * delta.powf(0.2),
        )
    }
}

pub fn combined_h(i: f64, j: f64, m: f64, n: f64, consts: &FunctionalConstants, delta: f64) -> f64 {
    let (a, b, c) = consts.coefficients(delta);
    j + a * i + b * n + c * m
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VirialSample {
    pub t: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub i: f64,
    pub j: f64,
    pub m: f64,
    pub n: f64,
    pub hfunc: f64,
    /// `|z₁|, |z₂|, |∂z₁|, |∂z₂|, |∂²z₂|`
    pub z_norms: [f64; 5],
    /// `|w₁|, |∂w₁|, |w₂|`
    pub w_norms: [f64; 3],
    pub k1: f64,
    pub k2: f64,
    pub sech_integrand: f64,
}

/// Dual variables and their derivatives at one instant.
struct Dual {
    v1: Vec<f64>,
    v2: Vec<f64>,
    dv1: Vec<f64>,
    dv2: Vec<f64>,
}

fn dual(grid: &Grid, u: &FieldPair, kink: &ShiftedKink, gamma: f64) -> Dual {
    let lu = apply_l_with(grid, &kink.v0, &u.first);
    let v1 = smoothing_apply(grid, gamma, &lu, 0);
    let v2 = smoothing_apply(grid, gamma, &u.second, 0);
    let dv1 = grid.derivative(&v1, 1);
    let dv2 = grid.derivative(&v2, 1);
    Dual { v1, v2, dv1, dv2 }
}

fn int(grid: &Grid, fs: &[&[f64]]) -> f64 {
    let s: f64 = (0..grid.len()).map(|i| fs.iter().map(|f| f[i]).product::<f64>()).sum();
    grid.spacing() * s
}

fn sech_weight(grid: &Grid, rho: f64) -> Vec<f64> {
    grid.sample(|x| 1.0 / (x - rho).cosh())
}

/// `(K1, K2, ∫sech(y)(u₁² + (∂u₁)² + u₂²))`.
pub fn decay_functionals(grid: &Grid, u: &FieldPair, gamma: f64, rho: f64) -> (f64, f64, f64) {
    let s = sech_weight(grid, rho);
    let k1 = int(grid, &[&s, &u.first, &u.first]);
    let r = smoothing_apply(grid, gamma, &u.second, 1);
    let k2 = int(grid, &[&s, &r, &r]);
    let d = grid.derivative(&u.first, 1);
    let dens: Vec<f64> = (0..grid.len()).map(|i| s[i] * (u.first[i].powi(2) + d[i].powi(2) + u.second[i].powi(2))).collect();
    (k1, k2, grid.integrate(&dens))
}

/// All functionals for a modulated perturbation `u` around `H(· - ρ)`.
pub fn virial_sample(grid: &Grid, u: &FieldPair, kink: &ShiftedKink, ws: &WeightSet, rho_dot: f64, consts: &FunctionalConstants) -> VirialSample {
    let gamma = ws.scales.gamma;
    let d = dual(grid, u, kink, gamma);
    let i = int(grid, &[ws.varphi_a.value(), &u.first, &u.second]);
    let j = int(grid, &[ws.psi_ab.value(), &d.v1, &d.v2]);
    let m = int(grid, &[ws.psi_ab.value(), &d.dv1, &d.dv2]);
    let n = int(grid, &[ws.rho_ab.value(), &d.dv1, &d.v2]);
    let loc = localized_fields(u, &FieldPair::new(d.v1.clone(), d.v2.clone()), ws);
    let l2 = |f: &[f64]| grid.norm(f, NormKind::L2);
    let dz1 = grid.derivative(&loc.z1, 1);
    let dz2 = grid.derivative(&loc.z2, 1);
    let ddz2 = grid.derivative(&loc.z2, 2);
    let dw1 = grid.derivative(&loc.w1, 1);
    let (k1, k2, sech_integrand) = decay_functionals(grid, u, gamma, kink.rho);
    VirialSample {
        t: 0.0,
        rho: kink.rho,
        rho_dot,
        i,
        j,
        m,
        n,
        hfunc: combined_h(i, j, m, n, consts, ws.scales.delta),
        z_norms: [l2(&loc.z1), l2(&loc.z2), l2(&dz1), l2(&dz2), l2(&ddz2)],
        w_norms: [l2(&loc.w1), l2(&dw1), l2(&loc.w2)],
        k1,
        k2,
        sech_integrand,
    }
}

/// Right-hand sides of the four identities at one instant.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct VirialRates {
    pub i: f64,
    pub j: f64,
    pub m: f64,
    pub n: f64,
    /// Sum of absolute values of the terms in each right-hand side.
    pub scale: [f64; 4],
}

fn sum_terms(t: &[f64]) -> (f64, f64) {
    (t.iter().sum(), t.iter().map(|v| v.abs()).sum())
}

pub fn virial_rates(grid: &Grid, u: &FieldPair, kink: &ShiftedKink, ws: &WeightSet, rho_dot: f64, dynamics: Dynamics) -> VirialRates {
    let gamma = ws.scales.gamma;
    let n = grid.len();
    let (u1, u2) = (&u.first, &u.second);
    let u1x = grid.derivative(u1, 1);
    let (h, hp, v0, v0p, v0pp) = (&kink.h, &kink.hp, &kink.v0, &kink.v0p, &kink.v0pp);
    let rp = rho_dot;
    let cubic = dynamics == Dynamics::Full;

    // I
    let phi = &ws.varphi_a.d;
    let dens: Vec<f64> = (0..n).map(|k| u2[k] * u2[k] + 3.0 * u1x[k] * u1x[k] + v0[k] * u1[k] * u1[k]).collect();
    let mut t = vec![
        -0.5 * int(grid, &[&phi[1], &dens]),
        0.5 * int(grid, &[&phi[3], u1, u1]),
        0.5 * int(grid, &[&phi[0], u1, u1, v0p]),
        -rp * int(grid, &[&phi[1], u1, u2]),
        rp * int(grid, &[&phi[0], hp, u2]),
    ];
    if cubic {
        let q: Vec<f64> = (0..n).map(|k| u1[k].powi(3) * (1.5 * u1[k] + 4.0 * h[k])).collect();
        let c: Vec<f64> = (0..n).map(|k| 2.0 * hp[k] * u1[k].powi(3)).collect();
        t.push(-0.5 * int(grid, &[&phi[1], &q]));
        t.push(0.5 * int(grid, &[&phi[0], &c]));
    }
    let (ri, si) = sum_terms(&t);

    // dual system: v̇₁ = ℒ∂v₂ + G, v̇₂ = ∂v₁ + F̃
    let d = dual(grid, u, kink, gamma);
    let d2v2 = grid.derivative(&d.v2, 2);
    let comm: Vec<f64> = (0..n).map(|k| v0pp[k] * d.dv2[k] + 2.0 * v0p[k] * d2v2[k]).collect();
    let mut g: Vec<f64> = smoothing_apply(grid, gamma, &comm, 0).iter().map(|v| gamma * v).collect();
    let drift: Vec<f64> = (0..n).map(|k| v0p[k] * u1[k]).collect();
    let rd = smoothing_apply(grid, gamma, &drift, 0);
    g.iter_mut().zip(&rd).for_each(|(a, b)| *a -= rp * b);
    let ft = if cubic {
        let nl: Vec<f64> = (0..n).map(|k| u1[k].powi(3) + 3.0 * h[k] * u1[k] * u1[k]).collect();
        smoothing_apply(grid, gamma, &nl, 1)
    } else {
        vec![0.0; n]
    };

    // J
    let psi = &ws.psi_ab.d;
    let dens: Vec<f64> = (0..n).map(|k| d.v1[k] * d.v1[k] + v0[k] * d.v2[k] * d.v2[k] + 3.0 * d.dv2[k] * d.dv2[k]).collect();
    let t = [
        -0.5 * int(grid, &[&psi[1], &dens]),
        0.5 * int(grid, &[&psi[3], &d.v2, &d.v2]),
        -0.5 * int(grid, &[&psi[0], v0p, &d.v2, &d.v2]),
        int(grid, &[&psi[0], &g, &d.v2]),
        int(grid, &[&psi[0], &ft, &d.v1]),
        -rp * int(grid, &[&psi[1], &d.v1, &d.v2]),
    ];
    let (rj, sj) = sum_terms(&t);

    // M
    let dg = grid.derivative(&g, 1);
    let dft = grid.derivative(&ft, 1);
    let dens: Vec<f64> = (0..n).map(|k| d.dv1[k] * d.dv1[k] + v0[k] * d.dv2[k] * d.dv2[k] + 3.0 * d2v2[k] * d2v2[k]).collect();
    let t = [
        -0.5 * int(grid, &[&psi[1], &dens]),
        0.5 * int(grid, &[&psi[3], &d.dv2, &d.dv2]),
        0.5 * int(grid, &[&psi[0], v0p, &d.dv2, &d.dv2]),
        int(grid, &[&psi[0], &dg, &d.dv2]),
        int(grid, &[&psi[0], &dft, &d.dv1]),
        -rp * int(grid, &[&psi[1], &d.dv1, &d.dv2]),
    ];
    let (rm, sm) = sum_terms(&t);

    // N
    let r = &ws.rho_ab.d;
    let dens: Vec<f64> = (0..n).map(|k| d2v2[k] * d2v2[k] + v0[k] * d.dv2[k] * d.dv2[k]).collect();
    let pot: Vec<f64> = (0..n).map(|k| r[2][k] * v0[k] + r[1][k] * v0p[k]).collect();
    let t = [
        -int(grid, &[&r[0], &dens]),
        int(grid, &[&r[0], &d.dv1, &d.dv1]),
        2.0 * int(grid, &[&r[2], &d.dv2, &d.dv2]),
        -0.5 * int(grid, &[&r[4], &d.v2, &d.v2]),
        0.5 * int(grid, &[&pot, &d.v2, &d.v2]),
        int(grid, &[&r[0], &d.v2, &dg]),
        int(grid, &[&r[0], &d.dv1, &ft]),
        -rp * int(grid, &[&r[1], &d.dv1, &d.v2]),
    ];
    let (rn, sn) = sum_terms(&t);

    VirialRates { i: ri, j: rj, m: rm, n: rn, scale: [si, sj, sm, sn] }
}

/// Outcome of one identity check: both sides and the relative residual
/// `|lhs - rhs| / max(|lhs|, |rhs|, |u|²)`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub lhs_half_step: f64,
    pub rhs: f64,
    pub relative: f64,
    pub relative_richardson: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub t: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub i: IdentityCheck,
    pub j: IdentityCheck,
    pub m: IdentityCheck,
    pub n: IdentityCheck,
}

impl IdentityReport {
    pub fn checks(&self) -> [(&'static str, IdentityCheck); 4] {
        [("I", self.i), ("J", self.j), ("M", self.m), ("N", self.n)]
    }

    pub fn max_relative(&self) -> f64 {
        self.checks().iter().map(|(_, c)| c.relative).fold(0.0, f64::max)
    }
}

/// Moving frame for the full flow. The linearized flow is linear about the
/// unshifted kink, so its frame stays at `ρ = 0`.
fn frame(bg: &KinkBackground, u_sim: &FieldPair, guess: f64, tube: f64, dynamics: Dynamics) -> Result<Modulated> {
    let grid = &bg.grid;
    match dynamics {
        Dynamics::Full => modulate(grid, &bg.h, u_sim, guess, tube),
        Dynamics::Linearized => {
            let kink = ShiftedKink::new(grid, 0.0);
            let orthogonality = grid.inner(&u_sim.first, &kink.hp);
            Ok(Modulated { rho: 0.0, rho_dot: 0.0, u: u_sim.clone(), kink, orthogonality })
        }
        Dynamics::Free => Err(invalid("dynamics", "identities need the kink potential")),
    }
}

/// Functionals of the simulated perturbation at one instant, with the
/// weights rebuilt at the frame's shift.
fn functionals_at(bg: &KinkBackground, scales: ScaleParams, u_sim: &FieldPair, guess: f64, tube: f64, dynamics: Dynamics) -> Result<(Modulated, [f64; 4])> {
    let grid = &bg.grid;
    let md = frame(bg, u_sim, guess, tube, dynamics)?;
    let ws = WeightSet::build(grid, scales, md.rho)?;
    let s = virial_sample(grid, &md.u, &md.kink, &ws, md.rho_dot, &FunctionalConstants::default());
    Ok((md, [s.i, s.j, s.m, s.n]))
}

/// Centered differences of `I, J, M, N` along the flow from `u_sim` at
/// steps `τ` and `τ/2`, against the identities at the center.
pub fn identity_check(bg: &KinkBackground, scales: ScaleParams, u_sim: &FieldPair, t: f64, tau: f64, dynamics: Dynamics, tube: f64) -> Result<IdentityReport> {
    let grid = &bg.grid;
    let md = frame(bg, u_sim, 0.0, tube, dynamics)?;
    let ws = WeightSet::build(grid, scales, md.rho)?;
    let rates = virial_rates(grid, &md.u, &md.kink, &ws, md.rho_dot, dynamics);
    let shifted = |s: f64| -> Result<[f64; 4]> {
        let v = advance(bg, u_sim, s, 1, Scheme::Yoshida4, dynamics)?;
        Ok(functionals_at(bg, scales, &v, md.rho, tube, dynamics)?.1)
    };
    let (fp, fm) = (shifted(tau)?, shifted(-tau)?);
    let (hp, hm) = (shifted(0.5 * tau)?, shifted(-0.5 * tau)?);
    let unorm = md.u.norm_h1l2(grid).powi(2);
    let rhs = [rates.i, rates.j, rates.m, rates.n];
    let mk = |k: usize| {
        let lhs = (fp[k] - fm[k]) / (2.0 * tau);
        let lhs2 = (hp[k] - hm[k]) / tau;
        let rich = (4.0 * lhs2 - lhs) / 3.0;
        let den = |l: f64| l.abs().max(rhs[k].abs()).max(unorm).max(f64::MIN_POSITIVE);
        IdentityCheck {
            lhs,
            lhs_half_step: lhs2,
            rhs: rhs[k],
            relative: (lhs - rhs[k]).abs() / den(lhs),
            relative_richardson: (rich - rhs[k]).abs() / den(rich),
        }
    };
    Ok(IdentityReport { t, rho: md.rho, rho_dot: md.rho_dot, i: mk(0), j: mk(1), m: mk(2), n: mk(3) })
}

/// One row of `diagnostics.csv`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub rho: f64,
    #[serde(rename = "rhoDot")]
    pub rho_dot: f64,
    pub h1l2_norm: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "Hfunc")]
    pub hfunc: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "sechIntegrand")]
    pub sech_integrand: f64,
    #[serde(rename = "boundaryEnergy")]
    pub boundary_energy: f64,
}

pub const DIAGNOSTICS_COLUMNS: [&str; 15] = [
    "t", "rho", "rhoDot", "h1l2_norm", "E", "P", "I", "J", "M", "N", "Hfunc", "K1", "K2", "sechIntegrand", "boundaryEnergy",
];

impl DiagnosticsRecord {
    pub fn values(&self) -> [f64; 15] {
        [
            self.t, self.rho, self.rho_dot, self.h1l2_norm, self.e, self.p, self.i, self.j, self.m, self.n,
            self.hfunc, self.k1, self.k2, self.sech_integrand, self.boundary_energy,
        ]
    }
}

/// Everything monitored at one time for a simulated perturbation.
pub fn diagnostics(bg: &KinkBackground, scales: ScaleParams, consts: &FunctionalConstants, t: f64, u_sim: &FieldPair, guess: f64, tube: f64) -> Result<(DiagnosticsRecord, VirialSample)> {
    let grid = &bg.grid;
    let md = modulate(grid, &bg.h, u_sim, guess, tube)?;
    let ws = WeightSet::build(grid, scales, md.rho)?;
    let mut s = virial_sample(grid, &md.u, &md.kink, &ws, md.rho_dot, consts);
    s.t = t;
    let full = full_state(bg, u_sim);
    let rec = DiagnosticsRecord {
        t,
        rho: md.rho,
        rho_dot: md.rho_dot,
        h1l2_norm: md.u.norm_h1l2(grid),
        e: energy(grid, &full),
        p: periodic_momentum(grid, &periodized_state(bg, u_sim)),
        i: s.i,
        j: s.j,
        m: s.m,
        n: s.n,
        hfunc: s.hfunc,
        k1: s.k1,
        k2: s.k2,
        sech_integrand: s.sech_integrand,
        boundary_energy: crate::evolution::boundary_energy(bg, u_sim),
    };
    Ok((rec, s))
}
