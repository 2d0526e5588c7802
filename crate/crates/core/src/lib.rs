//! Numerical laboratory for the kink of the fourth-order φ⁴ (wave
//! Cahn-Hilliard) equation
//!
//! ```text
//! ∂ₜ²φ + ∂ₓ²(∂ₓ²φ + φ - φ³) = 0,
//! ```
//!
//! written as the system `∂ₜφ₁ = ∂ₓφ₂`, `∂ₜφ₂ = ∂ₓ(-∂ₓ²φ₁ - φ₁ + φ₁³)`.
//!
//! - [`grid`]: periodic Fourier grid, quadrature and norms
//! - [`model`]: kink `H = tanh(x/√2)`, nonlinearity, energy and momentum
//! - [`weights`]: cutoffs and exponential weights for the virial functionals
//! - [`operators`]: `ℒ = -∂² + V₀` and relatives, spectra, coercivity, identities
//! - [`evolution`]: exact linear propagator, Strang splitting, Picard iteration
//! - [`modulation`]: kink shift `ρ(t)` and its velocity
//! - [`virials`]: virial functionals and their time-derivative identities
//! - [`expcli`]: configuration-driven scenarios and their output files

pub mod error;
pub mod evolution;
pub mod expcli;
pub mod grid;
mod jet;
pub mod model;
pub mod modulation;
pub mod operators;
mod quad;
pub mod virials;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Grid, NormKind};
pub use jet::Jet;
pub use model::{FieldPair, KinkBackground};
pub use weights::{ScaleParams, WeightSet};
