use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::SchrodingerOp;
use crate::error::{invalid, Error, Result};
use crate::grid::Grid;

/// Lowest eigenpairs of a discretized operator.
#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    #[serde(skip)]
    pub points: Vec<f64>,
    pub residuals: Vec<f64>,
    pub half_length: f64,
    pub n: usize,
    pub method: &'static str,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
    h: f64,
    points: Vec<f64>,
}

impl Tridiagonal {
    /// Second-order differences on `n` intervals of `[-L, L]`, Dirichlet ends.
    fn new(op: &SchrodingerOp, half_length: f64, n: usize) -> Self {
        let h = 2.0 * half_length / n as f64;
        let points: Vec<f64> = (1..n).map(|i| -half_length + i as f64 * h).collect();
        let diag = points.iter().map(|&x| 2.0 * op.mass / (h * h) + op.potential(x)).collect();
        Tridiagonal { diag, off: -op.mass / (h * h), h, points }
    }

    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let b2 = self.off * self.off;
        let mut d = 1.0;
        let mut count = 0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - lambda } else { a - lambda - b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + lambda.abs()).max(1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let m = v.len();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off * v[i - 1];
                }
                if i + 1 < m {
                    s += self.off * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solve `(T - sigma) x = b` by elimination without pivoting.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let m = b.len();
        let tiny = 1e-300;
        let mut c = vec![0.0; m];
        let mut y = vec![0.0; m];
        let mut piv = self.diag[0] - sigma;
        if piv.abs() < tiny {
            piv = tiny;
        }
        c[0] = self.off / piv;
        y[0] = b[0] / piv;
        for i in 1..m {
            let mut p = self.diag[i] - sigma - self.off * c[i - 1];
            if p.abs() < tiny {
                p = tiny;
            }
            c[i] = self.off / p;
            y[i] = (b[i] - self.off * y[i - 1]) / p;
        }
        for i in (0..m - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }

    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let m = self.diag.len();
        let mut v: Vec<f64> = (0..m).map(|i| 1.0 + 0.3 * (0.37 * i as f64).sin()).collect();
        for _ in 0..4 {
            v = self.solve_shifted(lambda, &v);
            normalize(&mut v, self.h);
        }
        v
    }
}

fn normalize(v: &mut [f64], h: f64) {
    let nrm = (h * v.iter().map(|a| a * a).sum::<f64>()).sqrt();
    let idx = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, a)| if a.abs() > acc.1 { (i, a.abs()) } else { acc })
        .0;
    let s = if v[idx] < 0.0 { -1.0 } else { 1.0 };
    v.iter_mut().for_each(|a| *a *= s / nrm);
}

/// `k` lowest eigenpairs from second-order finite differences.
pub fn eigen_lowest(op: &SchrodingerOp, half_length: f64, n: usize, k: usize) -> Result<EigenResult> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if n < 16 || k >= n - 1 {
        return Err(invalid("N", format!("too small for {k} eigenpairs")));
    }
    let t = Tridiagonal::new(op, half_length, n);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let lambda = t.eigenvalue(j);
        let v = t.eigenvector(lambda);
        let tv = t.apply(&v);
        let r = (t.h * tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>()).sqrt();
        eigenvalues.push(lambda);
        eigenvectors.push(v);
        residuals.push(r);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        points: t.points,
        residuals,
        half_length,
        n,
        method: "finite-difference",
    })
}

/// Extrapolates finite-difference eigenpairs from `n`, `2n`, `4n`
/// intervals, cancelling the `h^2` and `h^4` error terms; eigenvectors are
/// combined at the coarse points.
pub fn eigen_richardson(op: &SchrodingerOp, half_length: f64, n: usize, k: usize) -> Result<EigenResult> {
    let r1 = eigen_lowest(op, half_length, n, k)?;
    let r2 = eigen_lowest(op, half_length, 2 * n, k)?;
    let r4 = eigen_lowest(op, half_length, 4 * n, k)?;
    let h = 2.0 * half_length / n as f64;
    let extrap = |a: f64, b: f64, c: f64| (64.0 * c - 20.0 * b + a) / 45.0;
    let eigenvalues =
        (0..k).map(|j| extrap(r1.eigenvalues[j], r2.eigenvalues[j], r4.eigenvalues[j])).collect();
    let mut eigenvectors = Vec::with_capacity(k);
    for j in 0..k {
        let v1 = &r1.eigenvectors[j];
        let align = |w: &Vec<f64>, stride: usize| -> Vec<f64> {
            let coarse: Vec<f64> = (0..v1.len()).map(|i| w[stride * (i + 1) - 1]).collect();
            let dot: f64 = coarse.iter().zip(v1).map(|(a, b)| a * b).sum();
            let s = if dot < 0.0 { -1.0 } else { 1.0 };
            coarse.into_iter().map(|a| s * a).collect()
        };
        let v2 = align(&r2.eigenvectors[j], 2);
        let v4 = align(&r4.eigenvectors[j], 4);
        let mut v: Vec<f64> = (0..v1.len()).map(|i| extrap(v1[i], v2[i], v4[i])).collect();
        normalize(&mut v, h);
        eigenvectors.push(v);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        points: r1.points,
        residuals: r4.residuals,
        half_length,
        n,
        method: "finite-difference-richardson",
    })
}

/// `k` lowest eigenpairs of the dense Fourier collocation matrix.
pub fn eigen_spectral(op: &SchrodingerOp, grid: &Grid, k: usize) -> Result<EigenResult> {
    let n = grid.len();
    if k == 0 || k > n {
        return Err(invalid("k", format!("must lie in 1..={n}")));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = grid.derivative(&e, 2);
        e[j] = 0.0;
        for i in 0..n {
            m[(i, j)] = -op.mass * col[i];
        }
    }
    for (i, &x) in grid.points().iter().enumerate() {
        m[(i, i)] += op.potential(x);
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-14, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric QR did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let h = grid.spacing();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let lambda = eig.eigenvalues[j];
        let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().cloned().collect();
        normalize(&mut v, h);
        let tv = op.apply(grid, &v);
        let r = (h * tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>()).sqrt();
        eigenvalues.push(lambda);
        eigenvectors.push(v);
        residuals.push(r);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        points: grid.points().to_vec(),
        residuals,
        half_length: grid.half_length(),
        n,
        method: "fourier-collocation",
    })
}

impl EigenResult {
    /// Number of reported eigenvalues below `threshold`.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < threshold).count()
    }

    /// Cosine similarity between eigenvector `j` and `f` sampled on the
    /// same points.
    pub fn cosine_with(&self, j: usize, f: impl Fn(f64) -> f64) -> f64 {
        let v = &self.eigenvectors[j];
        let g: Vec<f64> = self.points.iter().map(|&x| f(x)).collect();
        let dot: f64 = v.iter().zip(&g).map(|(a, b)| a * b).sum();
        let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let ng: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        (dot / (nv * ng)).abs()
    }
}
