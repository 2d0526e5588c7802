//! Time integration of the perturbation system
//!
//! ```text
//! ∂ₜu₁ = ∂ₓu₂,   ∂ₜu₂ = ∂ₓ(-∂ₓ²u₁ + 2u₁ + F(u₁)),
//! ```
//!
//! with the constant-coefficient part solved exactly mode by mode.

mod picard;
mod vacuum;

pub use picard::{picard_solve, PicardOptions, PicardReport};
pub use vacuum::{vacuum_growth, VacuumReport};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::model::{energy, full_state, FieldPair, KinkBackground};

/// Which part of the right-hand side the kick carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// `F = 3u₁(H² - 1) + u₁²(u₁ + 3H)`
    #[default]
    Full,
    /// Only the potential well `3u₁(H² - 1)`.
    Linearized,
    /// `F ≡ 0`: the vacuum-coefficient linear flow.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Strang,
    /// Triple-jump composition of Strang steps (fourth order).
    Yoshida4,
}

/// Per-mode coefficients of `exp(dt A_ξ)` for
/// `A_ξ = [[0, iξ], [iξ(ξ² + m), 0]]`: entries `c`, `i p`, `i q`, `c`.
#[derive(Clone, Debug)]
pub struct PropagatorTable {
    pub dt: f64,
    pub mass: f64,
    pub c: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// `sin(ωt)/ω` for `ω² = w2`, continued analytically through `w2 <= 0`.
fn sinc_like(w2: f64, t: f64) -> (f64, f64) {
    if w2 > 0.0 {
        let w = w2.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else if w2 < 0.0 {
        let k = (-w2).sqrt();
        ((k * t).cosh(), (k * t).sinh() / k)
    } else {
        (1.0, t)
    }
}

impl PropagatorTable {
    /// `m = 2` around the kink; `m = -1` around the vacuum `φ = 0`.
    pub fn new(grid: &Grid, dt: f64, mass: f64) -> Self {
        let n = grid.len();
        let nyq = grid.nyquist_index();
        let mut c = vec![1.0; n];
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for (k, &xi) in grid.wavenumbers().iter().enumerate() {
            if k == nyq {
                // ∂ₓ drops this mode, so A vanishes there
                continue;
            }
            let w2 = xi * xi * (xi * xi + mass);
            let (ck, s) = sinc_like(w2, dt);
            c[k] = ck;
            p[k] = xi * s;
            q[k] = xi * (xi * xi + mass) * s;
        }
        PropagatorTable { dt, mass, c, p, q }
    }

    /// Per-mode determinant, `c² + p q`.
    pub fn determinant(&self, k: usize) -> f64 {
        self.c[k] * self.c[k] + self.p[k] * self.q[k]
    }

    /// Applies the table to Fourier coefficients in place.
    pub fn apply_spectral(&self, a: &mut [Complex64], b: &mut [Complex64]) {
        let i = Complex64::new(0.0, 1.0);
        for k in 0..a.len() {
            let (x, y) = (a[k], b[k]);
            a[k] = self.c[k] * x + i * self.p[k] * y;
            b[k] = i * self.q[k] * x + self.c[k] * y;
        }
    }
}

/// Forward transforms of two real fields with one complex FFT.
pub(crate) fn forward_pair(grid: &Grid, u: &FieldPair) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.len();
    let mut z: Vec<Complex64> = u.first.iter().zip(&u.second).map(|(&a, &b)| Complex64::new(a, b)).collect();
    grid.forward_complex(&mut z);
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let zc = z[(n - k) % n].conj();
        a[k] = 0.5 * (z[k] + zc);
        b[k] = Complex64::new(0.0, -0.5) * (z[k] - zc);
    }
    (a, b)
}

/// Inverse of [`forward_pair`].
pub(crate) fn inverse_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> FieldPair {
    let i = Complex64::new(0.0, 1.0);
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + i * y).collect();
    grid.inverse_complex(&mut z);
    FieldPair { first: z.iter().map(|c| c.re).collect(), second: z.iter().map(|c| c.im).collect() }
}

/// Exact step of the constant-coefficient flow.
pub fn linear_step(grid: &Grid, u: &FieldPair, table: &PropagatorTable) -> Result<FieldPair> {
    grid.check(&u.first)?;
    grid.check(&u.second)?;
    let (mut a, mut b) = forward_pair(grid, u);
    table.apply_spectral(&mut a, &mut b);
    Ok(inverse_pair(grid, &a, &b))
}

/// `∫ u₂² + (∂ₓu₁)² + m u₁²`, invariant under the linear flow.
pub fn linear_invariant(grid: &Grid, u: &FieldPair, mass: f64) -> f64 {
    let d = grid.derivative(&u.first, 1);
    grid.inner(&u.second, &u.second) + grid.inner(&d, &d) + mass * grid.inner(&u.first, &u.first)
}

/// Kick term `G(u₁)` whose derivative is added to `u₂`.
pub fn forcing(u1: &[f64], h: &[f64], dynamics: Dynamics) -> Vec<f64> {
    match dynamics {
        Dynamics::Full => crate::model::nonlinearity_with(u1, h),
        Dynamics::Linearized => u1.iter().zip(h).map(|(&u, &h)| 3.0 * u * (h * h - 1.0)).collect(),
        Dynamics::Free => vec![0.0; u1.len()],
    }
}

const YOSHIDA_W1: f64 = 1.351_207_191_959_657_8; // 1 / (2 - 2^{1/3})
const YOSHIDA_W0: f64 = -1.702_414_383_919_315_3; // -2^{1/3} w1

/// Steps the perturbation system on a fixed background.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub grid: Grid,
    pub dt: f64,
    pub scheme: Scheme,
    pub dynamics: Dynamics,
    h: Vec<f64>,
    tables: Vec<PropagatorTable>,
}

impl Stepper {
    pub fn new(bg: &KinkBackground, dt: f64, scheme: Scheme, dynamics: Dynamics) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(invalid("dt", format!("must be finite and nonzero, got {dt}")));
        }
        let grid = bg.grid.clone();
        let subs: Vec<f64> = match scheme {
            Scheme::Strang => vec![dt],
            Scheme::Yoshida4 => vec![YOSHIDA_W1 * dt, YOSHIDA_W0 * dt, YOSHIDA_W1 * dt],
        };
        let tables = subs.iter().map(|&s| PropagatorTable::new(&grid, s, 2.0)).collect();
        Ok(Stepper { grid, dt, scheme, dynamics, h: bg.h_moll.clone(), tables })
    }

    fn kick(&self, u: &mut FieldPair, tau: f64) {
        if self.dynamics == Dynamics::Free {
            return;
        }
        let f = forcing(&u.first, &self.h, self.dynamics);
        let df = self.grid.derivative(&f, 1);
        u.second.iter_mut().zip(df).for_each(|(v, d)| *v += tau * d);
    }

    fn strang(&self, u: &mut FieldPair, table: &PropagatorTable) {
        self.kick(u, 0.5 * table.dt);
        let (mut a, mut b) = forward_pair(&self.grid, u);
        table.apply_spectral(&mut a, &mut b);
        *u = inverse_pair(&self.grid, &a, &b);
        self.kick(u, 0.5 * table.dt);
    }

    pub fn step(&self, u: &mut FieldPair) {
        for t in &self.tables {
            self.strang(u, t);
        }
    }
}

/// Single Strang step: half-kick, exact linear step, half-kick.
pub fn strang_step(u: &FieldPair, table: &PropagatorTable, bg: &KinkBackground, dynamics: Dynamics) -> FieldPair {
    let st = Stepper {
        grid: bg.grid.clone(),
        dt: table.dt,
        scheme: Scheme::Strang,
        dynamics,
        h: bg.h_moll.clone(),
        tables: vec![table.clone()],
    };
    let mut v = u.clone();
    st.step(&mut v);
    v
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub dt: f64,
    pub scheme: Scheme,
    pub dynamics: Dynamics,
    /// Time between observer calls.
    pub sample_every: f64,
    /// Keep every `snapshot_stride`-th sample's fields (0 keeps none).
    pub snapshot_stride: usize,
    pub boundary_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dt: 0.05,
            scheme: Scheme::Strang,
            dynamics: Dynamics::Full,
            sample_every: 1.0,
            snapshot_stride: 0,
            boundary_threshold: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub boundary_energy: Vec<f64>,
    pub snapshots: Vec<(f64, FieldPair)>,
    pub final_state: FieldPair,
}

/// Quadratic energy density `½(u₂² + (∂ₓu₁)² + 2u₁²)` integrated over the
/// seam region `|x| > L - 3W`.
pub fn boundary_energy(bg: &KinkBackground, u: &FieldPair) -> f64 {
    let g = &bg.grid;
    let cut = g.half_length() - 3.0 * bg.width;
    let d = g.derivative(&u.first, 1);
    let s: f64 = g
        .points()
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > cut)
        .map(|(i, _)| 0.5 * (u.second[i].powi(2) + d[i].powi(2) + 2.0 * u.first[i].powi(2)))
        .sum();
    s * g.spacing()
}

/// Evolves `init` to time `t_end`, calling `observer` at `t = 0` and every
/// `sample_every`.
pub fn evolve(
    init: &FieldPair,
    t_end: f64,
    bg: &KinkBackground,
    opts: &EvolveOptions,
    mut observer: impl FnMut(f64, &FieldPair) -> Result<()>,
) -> Result<Trajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(invalid("T", format!("must be nonnegative, got {t_end}")));
    }
    if !(opts.dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {}", opts.dt)));
    }
    bg.grid.check(&init.first)?;
    bg.grid.check(&init.second)?;
    let steps = (t_end / opts.dt).round().max(if t_end > 0.0 { 1.0 } else { 0.0 }) as usize;
    let dt = if steps > 0 { t_end / steps as f64 } else { opts.dt };
    let every = ((opts.sample_every / dt).round() as usize).max(1);
    let stepper = Stepper::new(bg, dt, opts.scheme, opts.dynamics)?;
    let total = energy(&bg.grid, &full_state(bg, init));
    let mut traj = Trajectory::default();
    let mut u = init.clone();
    let mut sample_no = 0usize;
    let mut record = |t: f64, u: &FieldPair, traj: &mut Trajectory| -> Result<()> {
        let be = boundary_energy(bg, u);
        let frac = be / total.abs().max(f64::MIN_POSITIVE);
        if frac > opts.boundary_threshold {
            return Err(Error::BoundaryContamination { t, fraction: frac, threshold: opts.boundary_threshold });
        }
        traj.times.push(t);
        traj.boundary_energy.push(be);
        if opts.snapshot_stride > 0 && sample_no % opts.snapshot_stride == 0 {
            traj.snapshots.push((t, u.clone()));
        }
        sample_no += 1;
        observer(t, u)
    };
    record(0.0, &u, &mut traj)?;
    for s in 1..=steps {
        stepper.step(&mut u);
        let t = s as f64 * dt;
        if !u.is_finite() {
            return Err(Error::NumericalBlowup { t });
        }
        if s % every == 0 || s == steps {
            record(t, &u, &mut traj)?;
        }
    }
    traj.final_state = u;
    Ok(traj)
}

/// Advances `u` by `t` with `n` steps of the given scheme (negative `t`
/// runs backwards).
pub fn advance(bg: &KinkBackground, u: &FieldPair, t: f64, n: usize, scheme: Scheme, dynamics: Dynamics) -> Result<FieldPair> {
    if n == 0 {
        return Ok(u.clone());
    }
    let st = Stepper::new(bg, t / n as f64, scheme, dynamics)?;
    let mut v = u.clone();
    for _ in 0..n {
        st.step(&mut v);
    }
    Ok(v)
}
