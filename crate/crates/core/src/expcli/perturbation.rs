use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{PerturbationShape, PerturbationSpec};
use crate::error::{config_error, Result};
use crate::grid::Grid;
use crate::model::{kink, kink_prime, FieldPair};

fn normalized(grid: &Grid, u: FieldPair, amplitude: f64) -> Result<FieldPair> {
    let n = u.norm_h1l2(grid);
    if !(n > 0.0 && n.is_finite()) {
        return Err(config_error("perturbation", "profile vanishes on this grid"));
    }
    Ok(u.scaled(amplitude / n))
}

/// Initial perturbation `(u₁, u₂)` of `H¹×L²` norm `amplitude` (shifted
/// kinks: to first order in the shift).
pub fn build_perturbation(grid: &Grid, spec: &PerturbationSpec, amplitude: f64, seed: u64) -> Result<FieldPair> {
    let (c, w) = (spec.center, spec.width);
    let zeros = vec![0.0; grid.len()];
    match spec.shape {
        PerturbationShape::InternalMode => {
            let u1 = grid.sample(|x| {
                let z = (x - c) / SQRT_2;
                z.tanh() / z.cosh()
            });
            normalized(grid, FieldPair::new(u1, zeros), amplitude)
        }
        PerturbationShape::GaussianBump => {
            let u1 = grid.sample(|x| {
                let s = (x - c) / w;
                (-s * s).exp() * (1.0 + 0.3 * s)
            });
            let u2 = grid.sample(|x| {
                let s = (x - c) / w + 0.5;
                (-0.5 * s * s).exp()
            });
            normalized(grid, FieldPair::new(u1, u2), amplitude)
        }
        PerturbationShape::ShiftedKink => {
            let hp = grid.sample(kink_prime);
            let unit = FieldPair::new(hp, zeros.clone()).norm_h1l2(grid);
            let s = if c < 0.0 { -amplitude / unit } else { amplitude / unit };
            let u1 = grid.sample(|x| kink(x - s) - kink(x));
            Ok(FieldPair::new(u1, zeros))
        }
        PerturbationShape::RandomBandlimited => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let jmax = (spec.xi_max * grid.half_length() / PI).floor() as usize;
            let jmax = jmax.min(grid.len() / 2 - 1);
            let mut field = || {
                let coeffs: Vec<(f64, f64)> =
                    (0..=jmax).map(|_| (rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect();
                grid.sample(|x| {
                    let s = (x - c) / w;
                    let env = (-s * s).exp();
                    let sum: f64 = coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, (a, b))| {
                            let xi = PI * j as f64 / grid.half_length();
                            a * (xi * x).cos() + b * (xi * x).sin()
                        })
                        .sum();
                    env * sum
                })
            };
            let u1 = field();
            let u2 = field();
            normalized(grid, FieldPair::new(u1, u2), amplitude)
        }
    }
}
