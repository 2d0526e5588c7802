use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::SchrodingerOp;
use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, NormKind};
use crate::model::kink_prime;

fn first_derivative_matrix(grid: &Grid) -> DMatrix<f64> {
    let n = grid.len();
    let mut d = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = grid.derivative(&e, 1);
        e[j] = 0.0;
        for i in 0..n {
            d[(i, j)] = col[i];
        }
    }
    d
}

/// Minimum of `A` relative to `B` on the complement of `c`.
fn constrained_min(a: DMatrix<f64>, b: DMatrix<f64>, c: Option<DVector<f64>>) -> Result<f64> {
    let (a, b) = match c {
        None => (a, b),
        Some(c) => {
            let nc = c.norm();
            if nc == 0.0 {
                return Err(invalid("constraint", "vector is zero"));
            }
            // Householder reflector sending c to a multiple of e0
            let mut v = c.clone();
            v[0] += nc.copysign(c[0]);
            let vv = v.dot(&v);
            let n = v.len();
            let q = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
            let qa = &q * &a * &q;
            let qb = &q * &b * &q;
            (qa.view((1, 1), (n - 1, n - 1)).into_owned(), qb.view((1, 1), (n - 1, n - 1)).into_owned())
        }
    };
    let chol = b.cholesky().ok_or_else(|| Error::Eigen("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("singular Cholesky factor".into()))?;
    let c = &linv * a * linv.transpose();
    let sym = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-14, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric QR did not converge".into()))?;
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

fn forms(op: &SchrodingerOp, grid: &Grid, weight: &[f64], norm: NormKind) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let d = first_derivative_matrix(grid);
    let h = grid.spacing();
    let w = DMatrix::from_diagonal(&DVector::from_iterator(weight.len(), weight.iter().map(|v| v * h)));
    let dtwd = d.transpose() * &w * &d;
    let mut a = &dtwd * op.mass;
    for (i, &x) in grid.points().iter().enumerate() {
        a[(i, i)] += w[(i, i)] * op.potential(x);
    }
    let b = match norm {
        NormKind::L2 => w,
        NormKind::H1 => w + dtwd,
        NormKind::Linf => return Err(invalid("norm", "quotient needs L2 or H1")),
    };
    Ok((a, b))
}

/// `min ⟨op u, u⟩ / |u|^2` over `⟨u, c⟩ = 0` (or all `u`).
pub fn coercivity_quotient(op: &SchrodingerOp, grid: &Grid, constraint: Option<&[f64]>, norm: NormKind) -> Result<f64> {
    let ones = vec![1.0; grid.len()];
    let (a, b) = forms(op, grid, &ones, norm)?;
    let c = constraint.map(|c| DVector::from_iterator(c.len(), c.iter().map(|v| v * grid.spacing())));
    constrained_min(a, b, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoercivityRow {
    pub ell: f64,
    pub minimum: f64,
}

/// Weighted quotient `∫φ(u'^2 + V0 u^2) / ∫φ(u^2 + u'^2)` with
/// `φ = sech^2(ℓ x)`, constrained by `⟨u, H'⟩ = 0`.
pub fn weighted_coercivity(op: &SchrodingerOp, grid: &Grid, ells: &[f64]) -> Result<Vec<CoercivityRow>> {
    let y0 = grid.sample(kink_prime);
    ells.iter()
        .map(|&ell| {
            let w = grid.sample(|x| {
                let s = 1.0 / (ell * x).cosh();
                s * s
            });
            let (a, b) = forms(op, grid, &w, NormKind::H1)?;
            let c = DVector::from_iterator(y0.len(), y0.iter().map(|v| v * grid.spacing()));
            Ok(CoercivityRow { ell, minimum: constrained_min(a, b, Some(c))? })
        })
        .collect()
}
