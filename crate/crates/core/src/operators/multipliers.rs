//! Operator-norm measurements for Fourier multipliers composed with
//! multiplication operators.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::grid::Grid;
use crate::model::potential;

type Symbol = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Step {
    Mul(Vec<f64>),
    /// Symbol and whether it is odd (Nyquist mode dropped).
    Symbol(Symbol, bool),
}

/// Composition applied right to left: `steps[0]` acts last.
#[derive(Clone)]
pub struct OpChain {
    pub steps: Vec<Step>,
}

impl OpChain {
    pub fn new(steps: Vec<Step>) -> Self {
        OpChain { steps }
    }

    fn run(grid: &Grid, steps: &[&Step], f: &[f64], adjoint: bool) -> Vec<f64> {
        let mut v = f.to_vec();
        for step in steps {
            match step {
                Step::Mul(m) => v.iter_mut().zip(m).for_each(|(a, b)| *a *= b),
                Step::Symbol(s, odd) => {
                    let nyq = grid.nyquist_index();
                    let mut spec = grid.forward(&v);
                    for (k, (c, &xi)) in spec.iter_mut().zip(grid.wavenumbers()).enumerate() {
                        let m = if *odd && k == nyq { Complex64::new(0.0, 0.0) } else { s(xi) };
                        *c *= if adjoint { m.conj() } else { m };
                    }
                    v = grid.inverse(spec);
                }
            }
        }
        v
    }

    pub fn apply(&self, grid: &Grid, f: &[f64]) -> Vec<f64> {
        let steps: Vec<&Step> = self.steps.iter().rev().collect();
        Self::run(grid, &steps, f, false)
    }

    pub fn apply_adjoint(&self, grid: &Grid, f: &[f64]) -> Vec<f64> {
        let steps: Vec<&Step> = self.steps.iter().collect();
        Self::run(grid, &steps, f, true)
    }

    /// Power iteration on `M^T M`; returns the norm estimate.
    pub fn norm_estimate(&self, grid: &Grid, iterations: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut est = 0.0;
        for _ in 0..iterations {
            let nv = grid.norm(&v, crate::grid::NormKind::L2);
            v.iter_mut().for_each(|a| *a /= nv);
            let mv = self.apply(grid, &v);
            est = grid.norm(&mv, crate::grid::NormKind::L2);
            v = self.apply_adjoint(grid, &mv);
        }
        est
    }
}

fn real_symbol(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Step {
    Step::Symbol(Arc::new(move |xi| Complex64::new(f(xi), 0.0)), false)
}

fn resolvent(gamma: f64) -> Step {
    real_symbol(move |xi| 1.0 / (1.0 + gamma * xi * xi))
}

/// Exact norm of a pure multiplier: largest modulus over the grid modes.
fn symbol_max(grid: &Grid, odd: bool, s: impl Fn(f64) -> f64) -> f64 {
    let nyq = grid.nyquist_index();
    grid.wavenumbers()
        .iter()
        .enumerate()
        .filter(|(k, _)| !(odd && *k == nyq))
        .map(|(_, &xi)| s(xi).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplierEntry {
    pub name: String,
    pub gamma: f64,
    pub k: Option<f64>,
    pub measured: f64,
    /// Bound to compare against; `constant` is the factor in front.
    pub bound: f64,
    pub constant: f64,
    /// Closed-form or grid-limited reference when one exists.
    pub sharp: Option<f64>,
}

impl MultiplierEntry {
    pub fn within_bound(&self) -> bool {
        self.measured <= self.bound * (1.0 + 1e-12)
    }
}

/// Second-order finite differences on the interior points of `[-L, L]`
/// with Dirichlet ends. The discrete resolvent kernel decays exactly
/// exponentially, so compositions with `cosh(Kx)` stay bounded; a spectral
/// resolvent has algebraic tails that `cosh(KL)` would amplify.
#[derive(Clone, Debug)]
pub struct FdLine {
    pub h: f64,
    pub points: Vec<f64>,
}

impl FdLine {
    pub fn new(half_length: f64, intervals: usize) -> Self {
        let h = 2.0 * half_length / intervals as f64;
        FdLine { h, points: (1..intervals).map(|i| -half_length + i as f64 * h).collect() }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|&x| f(x)).collect()
    }

    fn norm(&self, v: &[f64]) -> f64 {
        (self.h * v.iter().map(|a| a * a).sum::<f64>()).sqrt()
    }

    /// `(a - b D2) v` with the three-point Laplacian.
    fn helmholtz(&self, a: f64, b: f64, v: &[f64]) -> Vec<f64> {
        let c = b / (self.h * self.h);
        let n = v.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                a * v[i] - c * (l - 2.0 * v[i] + r)
            })
            .collect()
    }

    /// Solves `(1 - γ D2) x = v` (Thomas algorithm, diagonally dominant).
    fn resolve(&self, gamma: f64, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let off = -gamma / (self.h * self.h);
        let diag = 1.0 - 2.0 * off;
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        c[0] = off / diag;
        y[0] = v[0] / diag;
        for i in 1..n {
            let p = diag - off * c[i - 1];
            c[i] = off / p;
            y[i] = (v[i] - off * y[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }

    fn central(&self, v: &[f64], sign: f64) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                sign * (r - l) / (2.0 * self.h)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum FdStep {
    Mul(Vec<f64>),
    /// `(1 - γ D2)^-1`
    Resolvent(f64),
    /// `1 - γ D2`
    InverseResolvent(f64),
    Derivative,
    /// `1 - D2`
    OneMinusLaplacian,
}

/// Composition on an [`FdLine`], applied right to left like [`OpChain`].
#[derive(Clone, Debug)]
pub struct FdChain {
    pub steps: Vec<FdStep>,
}

impl FdChain {
    pub fn new(steps: Vec<FdStep>) -> Self {
        FdChain { steps }
    }

    fn step(line: &FdLine, s: &FdStep, v: Vec<f64>, adjoint: bool) -> Vec<f64> {
        match s {
            FdStep::Mul(m) => v.iter().zip(m).map(|(a, b)| a * b).collect(),
            FdStep::Resolvent(g) => line.resolve(*g, &v),
            FdStep::InverseResolvent(g) => line.helmholtz(1.0, *g, &v),
            FdStep::Derivative => line.central(&v, if adjoint { -1.0 } else { 1.0 }),
            FdStep::OneMinusLaplacian => line.helmholtz(1.0, 1.0, &v),
        }
    }

    pub fn apply(&self, line: &FdLine, f: &[f64]) -> Vec<f64> {
        self.steps.iter().rev().fold(f.to_vec(), |v, s| Self::step(line, s, v, false))
    }

    pub fn apply_adjoint(&self, line: &FdLine, f: &[f64]) -> Vec<f64> {
        self.steps.iter().fold(f.to_vec(), |v, s| Self::step(line, s, v, true))
    }

    pub fn norm_estimate(&self, line: &FdLine, iterations: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = line.points.iter().map(|_| rng.random::<f64>() - 0.5).collect();
        let mut est = 0.0;
        for _ in 0..iterations {
            let nv = line.norm(&v);
            v.iter_mut().for_each(|a| *a /= nv);
            let mv = self.apply(line, &v);
            est = line.norm(&mv);
            v = self.apply_adjoint(line, &mv);
        }
        est
    }
}

/// Constant in front of the weighted resolvent estimates. It is not fixed
/// analytically; this value was calibrated once on the grids used here.
pub const CALIBRATED_C: f64 = 2.0;

/// Constant in the refined transform estimate, calibrated likewise.
pub const CALIBRATED_C_TRANSFORM: f64 = 3.0;

const POWER_ITERATIONS: usize = 400;

/// Measures every multiplier inequality for one `(γ, K)` pair. `grid`
/// carries the pure multipliers and the transform estimate; `line` the
/// sech/cosh compositions.
pub fn multiplier_norm_suite(grid: &Grid, line: &FdLine, gamma: f64, k: f64) -> Vec<MultiplierEntry> {
    let mut out = Vec::new();
    let sg = gamma.sqrt();
    out.push(MultiplierEntry {
        name: "R".into(),
        gamma,
        k: None,
        measured: symbol_max(grid, false, |xi| 1.0 / (1.0 + gamma * xi * xi)),
        bound: 1.0,
        constant: 1.0,
        sharp: Some(1.0),
    });
    out.push(MultiplierEntry {
        name: "R d/dx".into(),
        gamma,
        k: None,
        measured: symbol_max(grid, true, |xi| xi / (1.0 + gamma * xi * xi)),
        bound: 1.0 / sg,
        constant: 1.0,
        sharp: Some(0.5 / sg),
    });
    let xmax = grid.wavenumbers()[grid.nyquist_index()].abs();
    out.push(MultiplierEntry {
        name: "R (1 - d2/dx2)".into(),
        gamma,
        k: None,
        measured: symbol_max(grid, false, |xi| (1.0 + xi * xi) / (1.0 + gamma * xi * xi)),
        bound: 1.0 / gamma,
        constant: 1.0,
        sharp: Some((1.0 + xmax * xmax) / (1.0 + gamma * xmax * xmax)),
    });

    let sech = FdStep::Mul(line.sample(|x| 1.0 / (k * x).cosh()));
    let cosh = FdStep::Mul(line.sample(|x| (k * x).cosh()));
    let r = FdStep::Resolvent(gamma);
    let rinv = FdStep::InverseResolvent(gamma);
    let c = CALIBRATED_C;
    let entries: Vec<(&str, FdChain, f64)> = vec![
        ("sech R cosh R^-1", FdChain::new(vec![sech.clone(), r.clone(), cosh.clone(), rinv.clone()]), c),
        ("cosh R sech R^-1", FdChain::new(vec![cosh.clone(), r.clone(), sech.clone(), rinv]), c),
        ("sech R d/dx cosh", FdChain::new(vec![sech.clone(), r.clone(), FdStep::Derivative, cosh.clone()]), c / sg),
        (
            "sech R (1 - d2/dx2) cosh",
            FdChain::new(vec![sech, r, FdStep::OneMinusLaplacian, cosh]),
            c / gamma,
        ),
    ];
    for (i, (name, op, bound)) in entries.into_iter().enumerate() {
        out.push(MultiplierEntry {
            name: name.into(),
            gamma,
            k: Some(k),
            measured: op.norm_estimate(line, POWER_ITERATIONS, 17 + i as u64),
            bound,
            constant: c,
            sharp: None,
        });
    }
    // R ℒ against the norm sqrt(|f|^2 + |f'|^2 / γ)
    let r = resolvent(gamma);
    let v0 = Step::Mul(grid.sample(potential));
    let l_op = OpChain::new(vec![
        r.clone(),
        real_symbol(|xi| xi * xi),
        real_symbol(move |xi| 1.0 / (1.0 + xi * xi / gamma).sqrt()),
    ]);
    let v_op = OpChain::new(vec![r, v0, real_symbol(move |xi| 1.0 / (1.0 + xi * xi / gamma).sqrt())]);
    let sum = SumChain(l_op, v_op);
    out.push(MultiplierEntry {
        name: "R L (1 + |d/dx|^2/gamma)^-1/2".into(),
        gamma,
        k: None,
        measured: sum.norm_estimate(grid, POWER_ITERATIONS, 29),
        bound: CALIBRATED_C_TRANSFORM,
        constant: CALIBRATED_C_TRANSFORM,
        sharp: None,
    });
    out
}

struct SumChain(OpChain, OpChain);

impl SumChain {
    fn norm_estimate(&self, grid: &Grid, iterations: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut est = 0.0;
        for _ in 0..iterations {
            let nv = grid.norm(&v, crate::grid::NormKind::L2);
            v.iter_mut().for_each(|a| *a /= nv);
            let a = self.0.apply(grid, &v);
            let b = self.1.apply(grid, &v);
            let mv: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            est = grid.norm(&mv, crate::grid::NormKind::L2);
            let a = self.0.apply_adjoint(grid, &mv);
            let b = self.1.apply_adjoint(grid, &mv);
            v = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        }
        est
    }
}
