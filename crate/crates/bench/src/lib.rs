//! Fixtures shared by the benchmarks.

use kinklab_core::{FieldPair, Grid, KinkBackground};

/// Grid, kink background and a small skewed perturbation.
pub fn perturbed_kink(half_length: f64, n: usize) -> (Grid, KinkBackground, FieldPair) {
    let grid = Grid::new(half_length, n).expect("valid grid");
    let bg = KinkBackground::standard(&grid).expect("kink background");
    let u = FieldPair::new(
        grid.sample(|x| 0.01 * (-(x - 0.5) * (x - 0.5)).exp() * (1.0 + 0.3 * x)),
        grid.sample(|x| 0.005 * (-(x + 0.5) * (x + 0.5) / 2.0).exp()),
    );
    (grid, bg, u)
}
