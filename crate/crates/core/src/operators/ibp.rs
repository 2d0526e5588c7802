use serde::Serialize;

use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Identity {
    /// `⟨η ℒ f, g⟩ = ∫η(f'g' + V0 f g) + ⟨η' f', g⟩`
    L,
    /// `⟨η ∂ℒ f, f⟩`
    PL,
    /// `⟨η ℒ∂ f, f⟩`
    LP,
    /// `⟨η ∂ℒ∂ f, f⟩`
    PLP,
}

/// Both sides of each identity and the relative residual
/// `|lhs - rhs| / max(|lhs|, Σ|terms|)`.
#[derive(Clone, Debug, Serialize)]
pub struct IbpResiduals {
    pub lhs: [f64; 4],
    pub rhs: [f64; 4],
    pub relative: [f64; 4],
}

impl IbpResiduals {
    pub fn get(&self, id: Identity) -> (f64, f64, f64) {
        let i = id as usize;
        (self.lhs[i], self.rhs[i], self.relative[i])
    }

    pub fn max_relative(&self) -> f64 {
        self.relative.iter().cloned().fold(0.0, f64::max)
    }
}

fn prod(grid: &Grid, fs: &[&[f64]]) -> f64 {
    let n = grid.len();
    let s: f64 = (0..n).map(|i| fs.iter().map(|f| f[i]).product::<f64>()).sum();
    grid.spacing() * s
}

fn relative(lhs: f64, rhs: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(lhs.abs()).max(f64::MIN_POSITIVE);
    (lhs - rhs).abs() / scale
}

/// Residuals of the four integration-by-parts identities for a weight
/// `η` (value and four derivatives), decaying `f`, `g`, and the potential
/// `V0` with its derivative.
pub fn ibp_residuals(grid: &Grid, eta: &[Vec<f64>; 5], f: &[f64], g: &[f64], v0: &[f64], v0p: &[f64]) -> IbpResiduals {
    let d = |u: &[f64], k| grid.derivative(u, k);
    let (f1, f2, f3) = (d(f, 1), d(f, 2), d(f, 3));
    let g1 = d(g, 1);
    let lf: Vec<f64> = f.iter().zip(v0).zip(&f2).map(|((f, q), f2)| -f2 + q * f).collect();
    let lf1: Vec<f64> = f1.iter().zip(v0).zip(&f3).map(|((f1, q), f3)| -f3 + q * f1).collect();
    let plf = d(&lf, 1);
    let plpf = d(&lf1, 1);
    let e = eta;
    let mut lhs = [0.0; 4];
    let mut rhs = [0.0; 4];
    let mut rel = [0.0; 4];

    // L
    lhs[0] = prod(grid, &[&e[0], &lf, g]);
    let t = [prod(grid, &[&e[0], &f1, &g1]), prod(grid, &[&e[0], v0, f, g]), prod(grid, &[&e[1], &f1, g])];
    rhs[0] = t.iter().sum();
    rel[0] = relative(lhs[0], rhs[0], &t);

    // PL and LP share everything but the sign of ∫η V0' f^2
    let common = [
        -1.5 * prod(grid, &[&e[1], &f1, &f1]),
        -0.5 * prod(grid, &[&e[1], v0, f, f]),
        0.5 * prod(grid, &[&e[3], f, f]),
    ];
    let drift = 0.5 * prod(grid, &[&e[0], v0p, f, f]);
    lhs[1] = prod(grid, &[&e[0], &plf, f]);
    rhs[1] = common.iter().sum::<f64>() + drift;
    rel[1] = relative(lhs[1], rhs[1], &[common[0], common[1], common[2], drift]);
    lhs[2] = prod(grid, &[&e[0], &lf1, f]);
    rhs[2] = common.iter().sum::<f64>() - drift;
    rel[2] = relative(lhs[2], rhs[2], &[common[0], common[1], common[2], drift]);

    // PLP
    lhs[3] = prod(grid, &[&e[0], &plpf, f]);
    let t = [
        -prod(grid, &[&e[0], &f2, &f2]),
        -prod(grid, &[&e[0], v0, &f1, &f1]),
        2.0 * prod(grid, &[&e[2], &f1, &f1]),
        0.5 * prod(grid, &[&e[2], v0, f, f]),
        0.5 * prod(grid, &[&e[1], v0p, f, f]),
        -0.5 * prod(grid, &[&e[4], f, f]),
    ];
    rhs[3] = t.iter().sum();
    rel[3] = relative(lhs[3], rhs[3], &t);

    IbpResiduals { lhs, rhs, relative: rel }
}
