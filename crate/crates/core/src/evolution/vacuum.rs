//! Linear instability around the vacuum `φ = 0`:
//! `∂ₜu₁ = ∂ₓu₂`, `∂ₜu₂ = ∂ₓ(-∂ₓ²u₁ - u₁)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::model::FieldPair;

#[derive(Clone, Debug, Serialize)]
pub struct VacuumReport {
    pub k: f64,
    pub expected_rate: f64,
    /// Least-squares slope of `log|a(t)|` over the second half of the run.
    pub measured_rate: f64,
    /// `|k| sqrt(k² - 1)` for `|k| > 1`, else 0.
    pub expected_frequency: f64,
    /// From zero crossings of `a(t)`, 0 when it never changes sign.
    pub measured_frequency: f64,
    /// `max |a(t)| / |a(0)|`.
    pub max_amplitude_ratio: f64,
}

const HALF_LENGTH: f64 = 100.0 * PI;
const POINTS: usize = 512;
const DT: f64 = 0.02;

fn rhs(grid: &Grid, u: &FieldPair) -> FieldPair {
    let d2 = grid.derivative(&u.first, 2);
    let inner: Vec<f64> = d2.iter().zip(&u.first).map(|(a, b)| -a - b).collect();
    FieldPair { first: grid.derivative(&u.second, 1), second: grid.derivative(&inner, 1) }
}

fn rk4(grid: &Grid, u: &FieldPair, dt: f64) -> FieldPair {
    let k1 = rhs(grid, u);
    let mut y = u.clone();
    y.axpy(0.5 * dt, &k1);
    let k2 = rhs(grid, &y);
    let mut y = u.clone();
    y.axpy(0.5 * dt, &k2);
    let k3 = rhs(grid, &y);
    let mut y = u.clone();
    y.axpy(dt, &k3);
    let k4 = rhs(grid, &y);
    let mut out = u.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out
}

fn slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = ts.iter().zip(ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let den: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    num / den
}

/// Seeds `u₁ = cos(kx)`, integrates with classical RK4 on a Fourier grid
/// and fits the growth of the `cos(kx)` amplitude.
pub fn vacuum_growth(k: f64, t_end: f64) -> Result<VacuumReport> {
    let grid = Grid::new(HALF_LENGTH, POINTS)?;
    let j = k * HALF_LENGTH / PI;
    if !(k > 0.0) || (j - j.round()).abs() > 1e-9 || j.round() as usize >= POINTS / 2 {
        return Err(invalid("k", format!("{k} is not a resolved grid wavenumber")));
    }
    if !(t_end > 0.0) {
        return Err(invalid("T", "must be positive"));
    }
    let basis = grid.sample(|x| (k * x).cos());
    let norm2 = grid.inner(&basis, &basis);
    let mut u = FieldPair::new(basis.clone(), vec![0.0; grid.len()]);
    let steps = (t_end / DT).round() as usize;
    let dt = t_end / steps as f64;
    let mut ts = Vec::with_capacity(steps + 1);
    let mut amps = Vec::with_capacity(steps + 1);
    ts.push(0.0);
    amps.push(1.0);
    for s in 1..=steps {
        u = rk4(&grid, &u, dt);
        ts.push(s as f64 * dt);
        amps.push(grid.inner(&u.first, &basis) / norm2);
    }
    let half = ts.len() / 2;
    let logs: Vec<f64> = amps[half..].iter().map(|a| a.abs().max(f64::MIN_POSITIVE).ln()).collect();
    let expected_rate = crate::model::vacuum_growth_rate(k);
    let sign_changes: Vec<f64> = (1..amps.len())
        .filter(|&i| amps[i - 1] * amps[i] < 0.0)
        .map(|i| ts[i - 1] + dt * amps[i - 1] / (amps[i - 1] - amps[i]))
        .collect();
    let measured_frequency = if sign_changes.len() >= 2 {
        PI * (sign_changes.len() - 1) as f64 / (sign_changes[sign_changes.len() - 1] - sign_changes[0])
    } else {
        0.0
    };
    let measured_rate = if sign_changes.len() >= 2 { 0.0 } else { slope(&ts[half..], &logs) };
    Ok(VacuumReport {
        k,
        expected_rate,
        measured_rate,
        expected_frequency: crate::model::vacuum_dispersion(k)[0].re,
        measured_frequency,
        max_amplitude_ratio: amps.iter().fold(0.0_f64, |m, a| m.max(a.abs())),
    })
}
