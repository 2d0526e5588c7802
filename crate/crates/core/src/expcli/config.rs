//! Experiment configuration: JSON schema, per-scenario defaults and
//! validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{config_error, Error, Result};
use crate::evolution::{Dynamics, Scheme};
use crate::modulation::DEFAULT_TUBE_RADIUS;
use crate::virials::FunctionalConstants;
use crate::weights::ScaleParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Spectrum,
    Coercivity,
    Identities,
    Kernel4,
    Multipliers,
    Vacuum,
    Orbital,
    Decay,
    VirialTrace,
    PicardVsStrang,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Spectrum,
        Scenario::Coercivity,
        Scenario::Identities,
        Scenario::Kernel4,
        Scenario::Multipliers,
        Scenario::Vacuum,
        Scenario::Orbital,
        Scenario::Decay,
        Scenario::VirialTrace,
        Scenario::PicardVsStrang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Coercivity => "coercivity",
            Scenario::Identities => "identities",
            Scenario::Kernel4 => "kernel4",
            Scenario::Multipliers => "multipliers",
            Scenario::Vacuum => "vacuum",
            Scenario::Orbital => "orbital",
            Scenario::Decay => "decay",
            Scenario::VirialTrace => "virial-trace",
            Scenario::PicardVsStrang => "picard-vs-strang",
        }
    }

    /// Whether the scenario evolves a perturbed kink.
    pub fn uses_perturbation(self) -> bool {
        matches!(
            self,
            Scenario::Identities | Scenario::Orbital | Scenario::Decay | Scenario::VirialTrace | Scenario::PicardVsStrang
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

/// Decoupled `A, B, γ`; omitted means `A = 1/δ`, `B = A^(1/10)`, `γ = B^(-4)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleOverride {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationShape {
    /// `u₁ ∝ sech(y/√2) tanh(y/√2)`, `y = x - center`: the odd internal mode of `ℒ`; `u₂ = 0`.
    InternalMode,
    /// Skewed Gaussian pair of width `width` around `center`.
    GaussianBump,
    /// `u₁ = H(x - s) - H(x)` with `s` of sign `center` and size set by the amplitude.
    ShiftedKink,
    /// Seeded Fourier modes `|ξ| <= xi_max` under a Gaussian envelope.
    RandomBandlimited,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub shape: PerturbationShape,
    /// `H¹×L²` norm of the initial perturbation; `null` means `δ`.
    pub amplitude: Option<f64>,
    pub center: f64,
    pub width: f64,
    pub xi_max: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec { shape: PerturbationShape::GaussianBump, amplitude: None, center: 0.0, width: 4.0, xi_max: 2.0 }
    }
}

/// Knobs that only some scenarios read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioOptions {
    /// spectrum: eigenpairs of `ℒ` to report.
    pub eigen_count: usize,
    /// coercivity: decay rates `ℓ` of the `sech²(ℓx)` weights.
    pub ells: Vec<f64>,
    /// identities: number of randomized integration-by-parts pairs.
    pub ibp_pairs: usize,
    /// identities: grid for those pairs; the weights' cutoff transitions
    /// need a fine spacing for the quadrature to converge.
    pub ibp_grid: GridConfig,
    /// identities: trajectory times at which the virial identities are checked.
    pub identity_times: Vec<f64>,
    /// identities: half-width of the centered time difference.
    pub identity_tau: f64,
    /// vacuum: wavenumbers.
    pub wavenumbers: Vec<f64>,
    /// multipliers
    pub gammas: Vec<f64>,
    pub weight_rates: Vec<f64>,
    pub weighted_half_length: f64,
    pub weighted_intervals: usize,
    /// picard-vs-strang
    pub picard_subintervals: usize,
    pub picard_stages: usize,
    pub picard_max_iterations: usize,
    /// orbital: add energy/momentum drift checks at this relative tolerance.
    pub conservation_tolerance: Option<f64>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            eigen_count: 4,
            ells: vec![0.05, 0.1, 0.2, 0.5],
            ibp_pairs: 20,
            ibp_grid: GridConfig { half_length: 20.0, n: 8192 },
            identity_times: vec![0.5, 1.0, 1.5],
            identity_tau: 1e-3,
            wavenumbers: vec![0.3, 0.5, 0.7, 1.5],
            gammas: vec![0.1, 0.01],
            weight_rates: vec![0.5, 1.0],
            weighted_half_length: 20.0,
            weighted_intervals: 800,
            picard_subintervals: 200,
            picard_stages: 4,
            picard_max_iterations: 40,
            conservation_tolerance: None,
        }
    }
}

/// Everything needed to reproduce one run. Field names are the JSON keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub grid: GridConfig,
    pub delta: f64,
    pub scales: Option<ScaleOverride>,
    pub perturbation: PerturbationSpec,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: f64,
    pub scheme: Scheme,
    pub dynamics: Dynamics,
    pub tube_radius: f64,
    pub boundary_threshold: f64,
    pub constants: FunctionalConstants,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub options: ScenarioOptions,
}

impl ExperimentConfig {
    /// Defaults tuned per scenario: grids big enough that radiation stays
    /// clear of the seam for the default `T`.
    pub fn defaults(scenario: Scenario) -> Self {
        let mut c = ExperimentConfig {
            scenario,
            grid: GridConfig { half_length: 50.0, n: 1024 },
            delta: 0.01,
            scales: None,
            perturbation: PerturbationSpec::default(),
            t_end: 10.0,
            dt: 0.05,
            sample_every: 1.0,
            scheme: Scheme::Strang,
            dynamics: Dynamics::Full,
            tube_radius: DEFAULT_TUBE_RADIUS,
            boundary_threshold: 1e-8,
            constants: FunctionalConstants::default(),
            seed: 0,
            output_dir: PathBuf::from("runs").join(scenario.name()),
            options: ScenarioOptions::default(),
        };
        match scenario {
            Scenario::Spectrum | Scenario::Multipliers => {}
            Scenario::Coercivity => c.grid = GridConfig { half_length: 20.0, n: 256 },
            Scenario::Kernel4 => c.grid = GridConfig { half_length: 40.0, n: 2048 },
            Scenario::Identities => {
                c.grid = GridConfig { half_length: 40.0, n: 8192 };
                c.perturbation.width = 1.0;
                c.scheme = Scheme::Yoshida4;
                c.t_end = 1.5;
                c.dt = 0.05;
            }
            Scenario::Vacuum => {
                c.t_end = 40.0;
                c.dt = 0.02;
            }
            Scenario::Orbital => {
                c.grid = GridConfig { half_length: 1024.0, n: 8192 };
                c.t_end = 100.0;
            }
            Scenario::Decay => {
                c.grid = GridConfig { half_length: 1024.0, n: 8192 };
                c.t_end = 200.0;
            }
            Scenario::VirialTrace => {
                c.grid = GridConfig { half_length: 512.0, n: 4096 };
                c.t_end = 50.0;
                c.sample_every = 0.5;
            }
            Scenario::PicardVsStrang => {
                c.grid = GridConfig { half_length: 40.0, n: 256 };
                c.delta = 0.005;
                c.perturbation.width = 1.0;
                c.t_end = 1.0;
                c.dt = 0.005;
            }
        }
        c
    }

    /// Resolves a JSON document on top of the scenario defaults. The
    /// scenario comes from `scenario` if given, else from the document.
    pub fn from_value(doc: Value, scenario: Option<Scenario>) -> Result<Self> {
        let mut doc = match doc {
            Value::Object(m) => Value::Object(m),
            Value::Null => Value::Object(Default::default()),
            _ => return Err(config_error("<root>", "config must be a JSON object")),
        };
        let scenario = match scenario {
            Some(s) => s,
            None => match doc.get("scenario") {
                Some(Value::String(s)) => s.parse()?,
                Some(_) => return Err(config_error("scenario", "must be a string")),
                None => return Err(config_error("scenario", "missing")),
            },
        };
        doc["scenario"] = Value::String(scenario.name().to_string());
        let mut base = serde_json::to_value(Self::defaults(scenario))?;
        merge(&mut base, doc);
        let cfg: Self = serde_path_to_error::deserialize(base).map_err(|e| {
            let path = e.path().to_string();
            config_error(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str, scenario: Option<Scenario>) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| config_error("<root>", e.to_string()))?;
        Self::from_value(doc, scenario)
    }

    pub fn amplitude(&self) -> f64 {
        self.perturbation.amplitude.unwrap_or(self.delta)
    }

    pub fn scale_params(&self) -> Result<ScaleParams> {
        match self.scales {
            None => ScaleParams::from_delta(self.delta),
            Some(s) => ScaleParams::overridden(self.delta, s.a, s.b, s.gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, path: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_error(path, format!("must be positive and finite, got {v}")))
            }
        };
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(config_error("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        positive(self.grid.half_length, "grid.L")?;
        if self.grid.n < 16 || self.grid.n % 2 != 0 {
            return Err(config_error("grid.N", format!("must be even and at least 16, got {}", self.grid.n)));
        }
        positive(self.t_end, "T")?;
        positive(self.dt, "dt")?;
        positive(self.sample_every, "sample_every")?;
        positive(self.tube_radius, "tube_radius")?;
        positive(self.boundary_threshold, "boundary_threshold")?;
        positive(self.perturbation.width, "perturbation.width")?;
        positive(self.perturbation.xi_max, "perturbation.xi_max")?;
        if !self.perturbation.center.is_finite() {
            return Err(config_error("perturbation.center", "must be finite"));
        }
        let amp = self.amplitude();
        if !(amp > 0.0 && amp <= self.tube_radius) {
            return Err(config_error(
                "perturbation.amplitude",
                format!("must lie in (0, tube_radius = {}], got {amp}", self.tube_radius),
            ));
        }
        if let Some(s) = self.scales {
            ScaleParams::overridden(self.delta, s.a, s.b, s.gamma).map_err(|e| match e {
                Error::InvalidParameter { field, reason } => config_error(format!("scales.{field}"), reason),
                other => other,
            })?;
        }
        let o = &self.options;
        positive(o.ibp_grid.half_length, "options.ibp_grid.L")?;
        if o.ibp_grid.n < 16 || o.ibp_grid.n % 2 != 0 {
            return Err(config_error("options.ibp_grid.N", "must be even and at least 16"));
        }
        if o.identity_tau <= 0.0 || !o.identity_tau.is_finite() {
            return Err(config_error("options.identity_tau", "must be positive"));
        }
        if o.weighted_intervals < 4 {
            return Err(config_error("options.weighted_intervals", "need at least 4 intervals"));
        }
        positive(o.weighted_half_length, "options.weighted_half_length")?;
        if o.gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return Err(config_error("options.gammas", "each gamma must lie in (0, 1)"));
        }
        if o.weight_rates.iter().any(|k| !(*k > 0.0)) {
            return Err(config_error("options.weight_rates", "must be positive"));
        }
        if o.picard_subintervals == 0 || o.picard_stages == 0 {
            return Err(config_error("options.picard_subintervals", "need at least one subinterval and stage"));
        }
        if let Some(t) = o.conservation_tolerance {
            positive(t, "options.conservation_tolerance")?;
        }
        Ok(())
    }
}

/// Recursive object merge; scalars and arrays in `patch` replace `base`.
pub(crate) fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}
