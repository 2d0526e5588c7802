//! Fixed-point iteration of the Duhamel map
//!
//! ```text
//! Φ[u](t) = e^{tA} u⁰ + ∫₀ᵗ e^{(t-s)A} (0, ∂ₓF(u₁(s))) ds
//! ```
//!
//! with the time integral taken by Gauss-Legendre stages on a uniform
//! partition of `[0, T]`. The nonlinearity is interpolated inside each
//! subinterval through its stage values.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{forcing, inverse_pair, forward_pair, Dynamics, PropagatorTable};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::model::{FieldPair, KinkBackground};
use crate::quad::Rule;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PicardOptions {
    pub subintervals: usize,
    pub stages: usize,
    pub max_iterations: usize,
    /// Stop once the update norm falls below this.
    pub tolerance: f64,
    pub dynamics: Dynamics,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { subintervals: 200, stages: 4, max_iterations: 40, tolerance: 1e-13, dynamics: Dynamics::Full }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardReport {
    /// `sup_t |u^{n+1}(t) - u^n(t)|_{H¹×L²}` over the stage and grid times.
    pub differences: Vec<f64>,
    /// `differences[n+1] / differences[n]`.
    pub ratios: Vec<f64>,
    #[serde(skip)]
    pub final_state: FieldPair,
}

type Spec = (Vec<Complex64>, Vec<Complex64>);

fn lagrange(nodes: &[f64], j: usize, t: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &ti)| (t - ti) / (nodes[j] - ti))
        .product()
}

/// `H¹×L²` norm from Fourier coefficients.
fn spectral_norm(grid: &Grid, s: &Spec) -> f64 {
    let nyq = grid.nyquist_index();
    let xi = grid.wavenumbers();
    let mut acc = 0.0;
    for k in 0..s.0.len() {
        let d = if k == nyq { 0.0 } else { xi[k] * xi[k] };
        acc += (1.0 + d) * s.0[k].norm_sqr() + s.1[k].norm_sqr();
    }
    (grid.spacing() / grid.len() as f64 * acc).sqrt()
}

fn diff(a: &Spec, b: &Spec) -> Spec {
    (
        a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect(),
        a.1.iter().zip(&b.1).map(|(x, y)| x - y).collect(),
    )
}

struct Plan {
    theta: Vec<f64>,
    weights: Vec<f64>,
    dt: f64,
    full: PropagatorTable,
    to_stage: Vec<PropagatorTable>,
    from_stage: Vec<PropagatorTable>,
    // inner[q][m]: propagator from θ_q θ_m Δ to θ_q Δ
    inner: Vec<Vec<PropagatorTable>>,
    // interp[q][m][j] = ℓ_j(θ_q θ_m)
    interp: Vec<Vec<Vec<f64>>>,
}

impl Plan {
    fn new(grid: &Grid, t_end: f64, opts: &PicardOptions) -> Self {
        let rule = Rule::new(opts.stages);
        let theta: Vec<f64> = rule.nodes().iter().map(|t| 0.5 * (1.0 + t)).collect();
        let weights: Vec<f64> = rule.weights().iter().map(|w| 0.5 * w).collect();
        let dt = t_end / opts.subintervals as f64;
        let table = |t: f64| PropagatorTable::new(grid, t, 2.0);
        let inner = theta
            .iter()
            .map(|&tq| theta.iter().map(|&tm| table(tq * (1.0 - tm) * dt)).collect())
            .collect();
        let interp = theta
            .iter()
            .map(|&tq| {
                theta
                    .iter()
                    .map(|&tm| (0..theta.len()).map(|j| lagrange(&theta, j, tq * tm)).collect())
                    .collect()
            })
            .collect();
        Plan {
            full: table(dt),
            to_stage: theta.iter().map(|&t| table(t * dt)).collect(),
            from_stage: theta.iter().map(|&t| table((1.0 - t) * dt)).collect(),
            inner,
            interp,
            theta,
            weights,
            dt,
        }
    }
}

fn propagate(table: &PropagatorTable, s: &Spec) -> Spec {
    let mut out = s.clone();
    table.apply_spectral(&mut out.0, &mut out.1);
    out
}

/// Adds `w · e^{τA} (0, g)` to `acc`.
fn accumulate(table: &PropagatorTable, w: f64, g: &[Complex64], acc: &mut Spec) {
    let i = Complex64::new(0.0, 1.0);
    for k in 0..g.len() {
        acc.0[k] += w * i * table.p[k] * g[k];
        acc.1[k] += w * table.c[k] * g[k];
    }
}

/// `∂ₓ F` in Fourier space for a stage state.
fn nonlinear_term(grid: &Grid, h: &[f64], s: &Spec, dynamics: Dynamics) -> Vec<Complex64> {
    let u1 = grid.inverse(s.0.clone());
    let f = forcing(&u1, h, dynamics);
    let mut fh = grid.forward(&f);
    for (k, c) in fh.iter_mut().enumerate() {
        *c *= grid.derivative_symbol(k, 1);
    }
    fh
}

/// One application of the discrete Duhamel map. `stage_terms[k][q]` holds
/// `∂ₓF` at the stages of subinterval `k`; returns the stage states and
/// the states at the partition points.
fn sweep(plan: &Plan, init: &Spec, stage_terms: Option<&[Vec<Vec<Complex64>>]>, subintervals: usize) -> (Vec<Vec<Spec>>, Vec<Spec>) {
    let nq = plan.theta.len();
    let mut nodes = Vec::with_capacity(subintervals + 1);
    let mut stages = Vec::with_capacity(subintervals);
    let mut cur = init.clone();
    nodes.push(cur.clone());
    for k in 0..subintervals {
        let mut st = Vec::with_capacity(nq);
        for q in 0..nq {
            let mut s = propagate(&plan.to_stage[q], &cur);
            if let Some(terms) = stage_terms {
                let len = plan.theta[q] * plan.dt;
                for m in 0..nq {
                    let n = terms[k][0].len();
                    let mut g = vec![Complex64::new(0.0, 0.0); n];
                    for j in 0..nq {
                        let l = plan.interp[q][m][j];
                        g.iter_mut().zip(&terms[k][j]).for_each(|(a, b)| *a += l * b);
                    }
                    accumulate(&plan.inner[q][m], len * plan.weights[m], &g, &mut s);
                }
            }
            st.push(s);
        }
        let mut next = propagate(&plan.full, &cur);
        if let Some(terms) = stage_terms {
            for q in 0..nq {
                accumulate(&plan.from_stage[q], plan.dt * plan.weights[q], &terms[k][q], &mut next);
            }
        }
        stages.push(st);
        nodes.push(next.clone());
        cur = next;
    }
    (stages, nodes)
}

/// Iterates the Duhamel map starting from the free evolution of `init`.
pub fn picard_solve(init: &FieldPair, t_end: f64, bg: &KinkBackground, opts: &PicardOptions) -> Result<PicardReport> {
    if !(t_end > 0.0) {
        return Err(invalid("T", format!("must be positive, got {t_end}")));
    }
    if opts.subintervals == 0 || opts.stages == 0 {
        return Err(invalid("stages", "need at least one subinterval and stage"));
    }
    let grid = &bg.grid;
    grid.check(&init.first)?;
    let plan = Plan::new(grid, t_end, opts);
    let u0 = forward_pair(grid, init);
    let (mut stages, mut nodes) = sweep(&plan, &u0, None, opts.subintervals);
    let mut differences = Vec::new();
    for it in 0..opts.max_iterations {
        let terms: Vec<Vec<Vec<Complex64>>> = stages
            .iter()
            .map(|st| st.iter().map(|s| nonlinear_term(grid, &bg.h_moll, s, opts.dynamics)).collect())
            .collect();
        let (new_stages, new_nodes) = sweep(&plan, &u0, Some(&terms), opts.subintervals);
        let mut d: f64 = 0.0;
        for (a, b) in new_nodes.iter().zip(&nodes) {
            d = d.max(spectral_norm(grid, &diff(a, b)));
        }
        for (sa, sb) in new_stages.iter().zip(&stages) {
            for (a, b) in sa.iter().zip(sb) {
                d = d.max(spectral_norm(grid, &diff(a, b)));
            }
        }
        if !d.is_finite() {
            return Err(Error::NumericalBlowup { t: t_end });
        }
        differences.push(d);
        stages = new_stages;
        nodes = new_nodes;
        let n = differences.len();
        if n >= 3 && differences[n - 1] > differences[n - 2] && differences[n - 2] > differences[n - 3] {
            return Err(Error::PicardDivergence { iteration: it });
        }
        if d <= opts.tolerance {
            break;
        }
    }
    let ratios = differences.windows(2).map(|w| w[1] / w[0]).collect();
    let last = nodes.last().expect("at least one node");
    Ok(PicardReport { differences, ratios, final_state: inverse_pair(grid, &last.0, &last.1) })
}
