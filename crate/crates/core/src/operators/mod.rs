//! Linear operators around the kink and the tools that probe them.

mod coercivity;
mod eigen;
mod ibp;
mod kernel;
mod multipliers;

pub use coercivity::{coercivity_quotient, weighted_coercivity, CoercivityRow};
pub use eigen::{eigen_lowest, eigen_richardson, eigen_spectral, EigenResult};
pub use ibp::{ibp_residuals, IbpResiduals, Identity};
pub use kernel::{fourth_order_kernel, kernel_at, KernelReport};
pub use multipliers::{
    multiplier_norm_suite, FdChain, FdLine, FdStep, MultiplierEntry, OpChain, Step, CALIBRATED_C, CALIBRATED_C_TRANSFORM,
};

use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::model::{potential, FieldPair, KinkBackground};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `ℒ = -∂² + V0`
    L,
    /// `ℒ_# = -2∂² + V0`
    LSharp,
    /// `ℒ_## = (9/5)(-∂² + 1) - 3 sech²(x/√2)`
    LSharpSharp,
}

/// `-m ∂² + q(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchrodingerOp {
    pub kind: OperatorKind,
    pub mass: f64,
}

impl SchrodingerOp {
    pub fn new(kind: OperatorKind) -> Self {
        let mass = match kind {
            OperatorKind::L => 1.0,
            OperatorKind::LSharp => 2.0,
            OperatorKind::LSharpSharp => 1.8,
        };
        SchrodingerOp { kind, mass }
    }

    pub fn potential(&self, x: f64) -> f64 {
        match self.kind {
            OperatorKind::L | OperatorKind::LSharp => potential(x),
            OperatorKind::LSharpSharp => {
                let s = 1.0 / (x / SQRT_2).cosh();
                1.8 - 3.0 * s * s
            }
        }
    }

    pub fn apply(&self, grid: &Grid, f: &[f64]) -> Vec<f64> {
        let d2 = grid.derivative(f, 2);
        grid.points()
            .iter()
            .zip(f)
            .zip(d2)
            .map(|((&x, &v), d)| -self.mass * d + self.potential(x) * v)
            .collect()
    }
}

/// `ℒ f = -f'' + V0 f` with the exact potential.
pub fn apply_l(f: &[f64], bg: &KinkBackground) -> Vec<f64> {
    let d2 = bg.grid.derivative(f, 2);
    f.iter().zip(&bg.v0).zip(d2).map(|((v, q), d)| -d + q * v).collect()
}

/// `ℒ` with a potential sampled by the caller (e.g. shifted kinks).
pub fn apply_l_with(grid: &Grid, v0: &[f64], f: &[f64]) -> Vec<f64> {
    let d2 = grid.derivative(f, 2);
    f.iter().zip(v0).zip(d2).map(|((v, q), d)| -d + q * v).collect()
}

/// `(1 - γ∂²)^{-1} ∂^order f`.
pub fn smoothing_apply(grid: &Grid, gamma: f64, f: &[f64], order: u32) -> Vec<f64> {
    let xi = grid.wavenumbers();
    let mut spec = grid.forward(f);
    for (k, c) in spec.iter_mut().enumerate() {
        let d = if order == 0 { Complex64::new(1.0, 0.0) } else { grid.derivative_symbol(k, order) };
        *c *= d / (1.0 + gamma * xi[k] * xi[k]);
    }
    grid.inverse(spec)
}

/// `(v1, v2) = ((1 - γ∂²)^{-1} ℒ u1, (1 - γ∂²)^{-1} u2)` for a given `V0`.
pub fn transform_to_dual_with(grid: &Grid, v0: &[f64], gamma: f64, u: &FieldPair) -> FieldPair {
    let lu = apply_l_with(grid, v0, &u.first);
    FieldPair {
        first: smoothing_apply(grid, gamma, &lu, 0),
        second: smoothing_apply(grid, gamma, &u.second, 0),
    }
}

pub fn transform_to_dual(u: &FieldPair, gamma: f64, bg: &KinkBackground) -> FieldPair {
    transform_to_dual_with(&bg.grid, &bg.v0, gamma, u)
}
