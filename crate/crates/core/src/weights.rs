//! Cutoff, exponential weights and their antiderivatives, plus the
//! coupling between the perturbation size and the weight scales.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::jet::Jet;
use crate::quad;

fn bump_jet(t: Jet) -> Jet {
    // exp(-1/t) is below 1e-430 for t < 1e-3
    if t.value() < 1e-3 {
        return Jet::zero();
    }
    (-t.recip()).exp()
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn transition(t: f64) -> f64 {
    transition_jet(Jet::var(t)).value()
}

pub fn transition_jet(t: Jet) -> Jet {
    if t.value() <= 0.0 {
        return Jet::zero();
    }
    if t.value() >= 1.0 {
        return Jet::constant(1.0);
    }
    let f = bump_jet(t);
    let g = bump_jet(Jet::constant(1.0) - t);
    f.div(f + g)
}

fn abs_jet(x: f64) -> Jet {
    if x < 0.0 {
        -Jet::var(x)
    } else {
        Jet::var(x)
    }
}

/// Even cutoff: 1 on `[-1, 1]`, 0 for `|x| >= 2`.
pub fn chi_jet(x: f64) -> Jet {
    let r = x.abs();
    if r <= 1.0 {
        return Jet::constant(1.0);
    }
    if r >= 2.0 {
        return Jet::zero();
    }
    Jet::constant(1.0) - transition_jet(abs_jet(x) - Jet::constant(1.0))
}

pub fn chi(x: f64) -> f64 {
    chi_jet(x).value()
}

/// `χ_A(x) = χ(x / A)`.
pub fn chi_scaled_jet(a: f64, x: f64) -> Jet {
    chi_jet(x / a).rescaled(a)
}

/// `ζ_K(x) = exp(-(1 - χ(x)) |x| / K)`.
pub fn zeta_jet(k: f64, x: f64) -> Jet {
    if x.abs() <= 1.0 {
        return Jet::constant(1.0);
    }
    let one_minus_chi = Jet::constant(1.0) - chi_jet(x);
    (-(one_minus_chi * abs_jet(x)).scale(1.0 / k)).exp()
}

pub fn zeta(k: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        return 1.0;
    }
    (-(1.0 - chi(x)) * x.abs() / k).exp()
}

const VARPHI_TOL: f64 = 1e-12;

fn varphi_transition(k: f64, r: f64) -> f64 {
    let f = |y: f64| {
        let z = zeta(k, y);
        z * z
    };
    1.0 + quad::adaptive(&f, 1.0, r, VARPHI_TOL)
}

/// `φ_K(x) = ∫_0^x ζ_K^2`.
pub fn varphi(k: f64, x: f64) -> f64 {
    let r = x.abs();
    let v = if r <= 1.0 {
        r
    } else if r <= 2.0 {
        varphi_transition(k, r)
    } else {
        // ζ_K = e^{-|y|/K} beyond 2
        varphi_transition(k, 2.0) + 0.5 * k * ((-4.0 / k).exp() - (-2.0 * r / k).exp())
    };
    v.copysign(x)
}

/// Antiderivative `φ_K` of a precomputed tail value `φ_K(2)`.
fn varphi_with_tail(k: f64, x: f64, at_two: f64) -> f64 {
    let r = x.abs();
    let v = if r <= 1.0 {
        r
    } else if r <= 2.0 {
        varphi_transition(k, r)
    } else {
        at_two + 0.5 * k * ((-4.0 / k).exp() - (-2.0 * r / k).exp())
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub fn varphi_jet(k: f64, x: f64) -> Jet {
    zeta_jet(k, x).square().integral(varphi(k, x))
}

/// Localization scales.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub coupled: bool,
}

impl ScaleParams {
    /// `A = 1/δ`, `B = A^(1/10)`, `γ = B^(-4)`.
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        let a = 1.0 / delta;
        let b = a.powf(0.1);
        let gamma = b.powi(-4);
        Ok(ScaleParams { delta, a, b, gamma, coupled: true })
    }

    /// Decoupled scales; `delta` is kept for the combined functional.
    pub fn overridden(delta: f64, a: f64, b: f64, gamma: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        if !(a > 0.0) {
            return Err(invalid("A", format!("must be positive, got {a}")));
        }
        if !(b > 1.0) {
            return Err(invalid("B", format!("must exceed 1, got {b}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(invalid("gamma", format!("must lie in (0, 1), got {gamma}")));
        }
        Ok(ScaleParams { delta, a, b, gamma, coupled: false })
    }
}

/// A weight sampled on the grid with its first four derivatives.
#[derive(Clone, Debug)]
pub struct Weight {
    pub d: [Vec<f64>; 5],
}

impl Weight {
    fn from_jets(jets: &[Jet]) -> Self {
        let d = std::array::from_fn(|k| jets.iter().map(|j| j.d(k)).collect());
        Weight { d }
    }

    pub fn value(&self) -> &[f64] {
        &self.d[0]
    }
}

/// All weights at `y = x - shift`.
#[derive(Clone, Debug)]
pub struct WeightSet {
    pub scales: ScaleParams,
    pub shift: f64,
    pub chi_a: Weight,
    pub zeta_a: Weight,
    pub zeta_b: Weight,
    pub varphi_a: Weight,
    pub varphi_b: Weight,
    pub psi_ab: Weight,
    pub rho_ab: Weight,
}

impl WeightSet {
    pub fn build(grid: &Grid, scales: ScaleParams, shift: f64) -> Result<Self> {
        if !(shift.abs() < 0.5 * grid.half_length()) {
            return Err(invalid("rho", format!("shift {shift} too close to the seam")));
        }
        let (a, b) = (scales.a, scales.b);
        let tail_a = varphi(a, 2.0);
        let tail_b = varphi(b, 2.0);
        let n = grid.len();
        let mut jets: [Vec<Jet>; 7] = std::array::from_fn(|_| Vec::with_capacity(n));
        for &x in grid.points() {
            let y = x - shift;
            let chi_a = chi_scaled_jet(a, y);
            let zeta_a = zeta_jet(a, y);
            let zeta_b = zeta_jet(b, y);
            let varphi_a = zeta_a.square().integral(varphi_with_tail(a, y, tail_a));
            let varphi_b = zeta_b.square().integral(varphi_with_tail(b, y, tail_b));
            let chi2 = chi_a.square();
            jets[0].push(chi_a);
            jets[1].push(zeta_a);
            jets[2].push(zeta_b);
            jets[3].push(varphi_a);
            jets[4].push(varphi_b);
            jets[5].push(chi2 * varphi_b);
            jets[6].push(chi2 * zeta_b.square());
        }
        let w: Vec<Weight> = jets.iter().map(|j| Weight::from_jets(j)).collect();
        let mut it = w.into_iter();
        let mut next = || it.next().unwrap();
        Ok(WeightSet {
            scales,
            shift,
            chi_a: next(),
            zeta_a: next(),
            zeta_b: next(),
            varphi_a: next(),
            varphi_b: next(),
            psi_ab: next(),
            rho_ab: next(),
        })
    }
}
