//! Solutions of `-∂²ℒ u = 0` built from `H'` by reduction of order.

use std::f64::consts::{LN_2, SQRT_2};

use serde::Serialize;

use super::apply_l;
use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::model::{kink_prime, potential, KinkBackground};
use crate::quad::Rule;

const MAX_EXTENT: f64 = 35.0;
const PANEL: f64 = 0.25;

fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `log H'(x)`.
fn log_hp(x: f64) -> f64 {
    -0.5 * LN_2 - 2.0 * log_cosh(x / SQRT_2)
}

/// `1 + H(x)` without cancellation on the left.
fn one_plus_kink(x: f64) -> f64 {
    let z = x / SQRT_2;
    if z < 0.0 {
        let e = (2.0 * z).exp();
        2.0 * e / (1.0 + e)
    } else {
        1.0 + z.tanh()
    }
}

/// `∫_{-∞}^x s H'(s) ds` in closed form, stable in both tails.
fn first_moment(x: f64) -> f64 {
    let z = x / SQRT_2;
    let sign = if z < 0.0 { -1.0 } else { 1.0 };
    // tanh z - sign(z) = -sign * 2 e^{-2|z|} / (1 + e^{-2|z|})
    let e = (-2.0 * z.abs()).exp();
    let t = -sign * 2.0 * e / (1.0 + e);
    SQRT_2 * (z * t - e.ln_1p())
}

/// `(u0, u1, u2, u3)` at `x`.
pub fn kernel_at(x: f64) -> [f64; 4] {
    let rule = Rule::new(16);
    let panels = (x.abs() / PANEL).ceil().max(1.0) as usize;
    let step = x / panels as f64;
    let mut acc = [0.0; 3];
    for p in 0..panels {
        let a = p as f64 * step;
        let b = a + step;
        let w = |y: f64| (-2.0 * log_hp(y)).exp();
        acc[0] += rule.integrate(a, b, w);
        acc[1] += rule.integrate(a, b, |y| w(y) * one_plus_kink(y));
        acc[2] += rule.integrate(a, b, |y| w(y) * first_moment(y));
    }
    let lh = log_hp(x);
    let scaled = |i: f64| if i == 0.0 { 0.0 } else { i.signum() * (lh + i.abs().ln()).exp() };
    [kink_prime(x), scaled(acc[0]), -2.0 * scaled(acc[1]), scaled(acc[2])]
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    /// Max of `|-∂²ℒ u0|` on `|x| <= L/2`, spectral derivatives.
    pub residual_u0: f64,
    /// Max of `|-∂²ℒ u_i|` on `|x| <= 5`, finite differences.
    pub residuals_fd: [f64; 4],
    /// Values at `x = -30`.
    pub limits: [f64; 4],
    pub extent: f64,
}

/// `-∂²ℒ` at `x` by nested fourth-order central differences.
fn fd_residual(i: usize, x: f64, s: f64) -> f64 {
    let c = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
    let lu = |y: f64| {
        let d2: f64 = (0..5).map(|j| c[j] * kernel_at(y + (j as f64 - 2.0) * s)[i]).sum::<f64>() / (s * s);
        -d2 + potential(y) * kernel_at(y)[i]
    };
    let vals: Vec<f64> = (0..5).map(|j| lu(x + (j as f64 - 2.0) * s)).collect();
    -(0..5).map(|j| c[j] * vals[j]).sum::<f64>() / (s * s)
}

pub fn fourth_order_kernel(grid: &Grid) -> Result<KernelReport> {
    let l = grid.half_length();
    if l < 30.0 {
        return Err(invalid("L", format!("kernel functions need L >= 30, got {l}")));
    }
    let bg = KinkBackground::standard(grid)?;
    let lu0 = apply_l(&bg.hp, &bg);
    let r = grid.derivative(&lu0, 2);
    let residual_u0 = grid
        .points()
        .iter()
        .zip(&r)
        .filter(|(x, _)| x.abs() <= 0.5 * l)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let mut residuals_fd = [0.0; 4];
    let s = 0.05;
    for (i, res) in residuals_fd.iter_mut().enumerate() {
        *res = (-20..=20).map(|k| fd_residual(i, 0.25 * k as f64, s).abs()).fold(0.0, f64::max);
    }
    Ok(KernelReport { residual_u0, residuals_fd, limits: kernel_at(-30.0), extent: l.min(MAX_EXTENT) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_moment_matches_quadrature() {
        let rule = Rule::new(16);
        for &x in &[-3.0f64, 0.0, 1.5] {
            let mut q = 0.0;
            let mut a = -60.0;
            while a < x {
                let b = (a + 0.5).min(x);
                q += rule.integrate(a, b, |s| s * kink_prime(s));
                a = b;
            }
            assert!((first_moment(x) - q).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn second_function_has_closed_form() {
        // 1/H'^2 = 2 cosh^4(z); its integral is elementary
        let x: f64 = 3.0;
        let z = x / SQRT_2;
        let i1 = SQRT_2 * (3.0 * z + 2.0 * (2.0 * z).sinh() + 0.25 * (4.0 * z).sinh()) / 4.0;
        let u1 = kink_prime(x) * i1;
        assert!((kernel_at(x)[1] - u1).abs() < 1e-12 * u1.abs());
    }
}
