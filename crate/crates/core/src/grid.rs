//! Uniform periodic grid on `[-L, L)` with Fourier collocation.
//!
//! Every field in the crate is a plain `Vec<f64>` sampled at [`Grid::points`];
//! the grid owns the FFT plans, the wavenumber table and the quadrature rule.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Norms available through [`Grid::norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    H1,
    Linf,
}

#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    n: usize,
    h: f64,
    x: Vec<f64>,
    // FFT ordering: 0, 1, ..., N/2-1, -N/2, ..., -1
    xi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("n", &self.n)
            .field("h", &self.h)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl Grid {
    /// Grid with `n` points on `[-half_length, half_length)`.
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(invalid("L", format!("must be positive, got {half_length}")));
        }
        if n % 2 != 0 {
            return Err(invalid("N", format!("must be even, got {n}")));
        }
        if n < 16 {
            return Err(invalid("N", format!("must be at least 16, got {n}")));
        }
        Ok(Self::build(half_length, n))
    }

    fn build(half_length: f64, n: usize) -> Self {
        let h = 2.0 * half_length / n as f64;
        let x = (0..n).map(|j| -half_length + j as f64 * h).collect();
        let xi = (0..n).map(|k| PI * Self::mode_index(k, n) as f64 / half_length).collect();
        let mut planner = FftPlanner::new();
        Grid {
            half_length,
            n,
            h,
            x,
            xi,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn mode_index(k: usize, n: usize) -> i64 {
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[f64] {
        &self.x
    }

    /// Wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    /// Wavenumbers ordered as `j = -N/2, ..., N/2 - 1`.
    pub fn wavenumbers_sorted(&self) -> Vec<f64> {
        let half = self.n as i64 / 2;
        (-half..half).map(|j| PI * j as f64 / self.half_length).collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.x.iter().map(|&x| f(x)).collect()
    }

    pub fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::GridMismatch { expected: self.n, got: f.len() });
        }
        Ok(())
    }

    /// Unnormalized forward DFT.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse of [`Grid::forward`], keeping the real part.
    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut spec);
        let scale = 1.0 / self.n as f64;
        spec.iter().map(|c| c.re * scale).collect()
    }

    pub fn forward_complex(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    pub fn inverse_complex(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    /// Apply the Fourier multiplier `symbol(xi)`; the Nyquist mode is
    /// handled by the caller's symbol.
    pub fn apply_symbol(&self, f: &[f64], symbol: impl Fn(f64) -> Complex64) -> Vec<f64> {
        let mut spec = self.forward(f);
        for (c, &xi) in spec.iter_mut().zip(&self.xi) {
            *c *= symbol(xi);
        }
        self.inverse(spec)
    }

    /// Symbol of `d^order/dx^order` at storage index `k`.
    pub fn derivative_symbol(&self, k: usize, order: u32) -> Complex64 {
        if order % 2 == 1 && k == self.n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.xi[k]).powu(order)
    }

    pub fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        if order == 0 {
            return f.to_vec();
        }
        let mut spec = self.forward(f);
        for (k, c) in spec.iter_mut().enumerate() {
            *c *= self.derivative_symbol(k, order);
        }
        self.inverse(spec)
    }

    /// `F(x) = ∫_{-L}^{x} f`: spectral antiderivative of the mean-free part
    /// plus the mean times `x + L`.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        let mean = f.iter().sum::<f64>() / self.n as f64;
        let mut spec = self.forward(f);
        for (k, c) in spec.iter_mut().enumerate() {
            *c = if k == 0 || k == self.n / 2 { Complex64::new(0.0, 0.0) } else { *c / Complex64::new(0.0, self.xi[k]) };
        }
        let g = self.inverse(spec);
        let g0 = g[0];
        g.iter().zip(&self.x).map(|(v, x)| v - g0 + mean * (x + self.half_length)).collect()
    }

    /// Rectangle rule, `h * sum(f)`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.h * f.iter().sum::<f64>()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.h * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `∫ w f g`.
    pub fn inner_weighted(&self, w: &[f64], f: &[f64], g: &[f64]) -> f64 {
        self.h * w.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum::<f64>()
    }

    pub fn norm(&self, f: &[f64], kind: NormKind) -> f64 {
        match kind {
            NormKind::L2 => self.inner(f, f).sqrt(),
            NormKind::H1 => {
                let df = self.derivative(f, 1);
                (self.inner(f, f) + self.inner(&df, &df)).sqrt()
            }
            NormKind::Linf => f.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        }
    }

    /// `sqrt(|f1|_{H1}^2 + |f2|_{L2}^2)`.
    pub fn norm_h1l2(&self, f1: &[f64], f2: &[f64]) -> f64 {
        let a = self.norm(f1, NormKind::H1);
        let b = self.norm(f2, NormKind::L2);
        (a * a + b * b).sqrt()
    }

    /// `∫ f^2` evaluated from the Fourier coefficients.
    pub fn parseval(&self, f: &[f64]) -> f64 {
        let spec = self.forward(f);
        self.h / self.n as f64 * spec.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Index shift that maps `x` to the nearest grid point.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.half_length) / self.h).round() as i64;
        j.rem_euclid(self.n as i64) as usize
    }
}
