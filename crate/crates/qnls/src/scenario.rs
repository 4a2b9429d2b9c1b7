//! Declarative run configuration (TOML) and run provenance records.
//!
//! A [`Scenario`] fully determines a simulation: model, grid, initial-data
//! family, solver parameters, and the diagnostic channels to record.
//! Serialization round-trips exactly, so a recorded scenario re-runs the
//! same experiment. A [`RunRecord`] captures the scenario together with
//! the seed, timing, and SHA-256 hashes of every produced artifact.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QnlsError;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::lemmas::EnsembleSpec;
use crate::models::ModelProblem;
use crate::solver::{Scheme, SolverConfig};

/// Grid section of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per axis (all axes equal).
    pub points: usize,
    /// Box half-width per axis.
    pub half_width: f64,
}

/// Supported initial-data families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InitialData {
    /// `a · exp(-|x|²/(2σ²)) · e^{i k·x}` with integer modulation modes `k`.
    Gaussian {
        amplitude: f64,
        sigma: f64,
        #[serde(default)]
        modulation: Vec<i64>,
    },
    /// `a · e^{i ξ·x}` with `ξ_a = π k_a / R_a`.
    PlaneWave { amplitude: f64, wavenumbers: Vec<i64> },
    /// Seeded random band-limited field, optionally Gaussian-windowed.
    RandomBandLimited {
        amplitude: f64,
        #[serde(default)]
        window_sigma: Option<f64>,
    },
}

/// Solver section of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    /// Time step.
    pub dt: f64,
    /// Final simulation time.
    pub t_end: f64,
    /// Time-stepping scheme.
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    /// Fourth-order spectral viscosity coefficient.
    #[serde(default)]
    pub viscosity: f64,
    /// Steps between recorded checkpoints.
    #[serde(default = "default_stride")]
    pub checkpoint_stride: usize,
}

fn default_scheme() -> Scheme {
    Scheme::StrangRk2
}

fn default_stride() -> usize {
    10
}

/// A complete, reproducible experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Built-in model name (see `ModelProblem::builtin_names`).
    pub model: String,
    /// Spatial dimension.
    pub dim: usize,
    /// Grid parameters.
    pub grid: GridSpec,
    /// Initial-data family.
    pub initial: InitialData,
    /// Solver parameters.
    pub solver: SolverSpec,
    /// Diagnostic channels to record, e.g. `"mass"`, `"sobolev:3"`,
    /// `"good-term-y:5"`, `"bootstrap-quadratic:5:3"`.
    #[serde(default)]
    pub diagnostics: Vec<String>,
    /// Output directory (overridable on the command line).
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl Scenario {
    /// Parse from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, QnlsError> {
        let s: Scenario = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Load and parse from a file.
    pub fn load(path: &Path) -> Result<Self, QnlsError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Serialize to TOML text; `from_toml_str` of the result yields an
    /// equal scenario.
    pub fn to_toml_string(&self) -> Result<String, QnlsError> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Basic cross-field validation (grid and model construction perform
    /// their own deeper checks).
    pub fn validate(&self) -> Result<(), QnlsError> {
        if self.solver.dt <= 0.0 || self.solver.t_end < 0.0 {
            return Err(QnlsError::Config("need dt > 0 and t_end >= 0".into()));
        }
        if self.solver.checkpoint_stride == 0 {
            return Err(QnlsError::Config("checkpoint_stride must be >= 1".into()));
        }
        if let InitialData::PlaneWave { wavenumbers, .. } = &self.initial {
            if wavenumbers.len() != self.dim {
                return Err(QnlsError::Config(format!(
                    "plane wave needs {} wavenumbers, got {}",
                    self.dim,
                    wavenumbers.len()
                )));
            }
        }
        Ok(())
    }

    /// Construct the grid.
    pub fn build_grid(&self) -> Result<Grid, QnlsError> {
        Grid::cubic(self.dim, self.grid.points, self.grid.half_width)
    }

    /// Construct the model.
    pub fn build_model(&self) -> Result<ModelProblem, QnlsError> {
        ModelProblem::builtin(&self.model, self.dim)
    }

    /// Construct the solver configuration.
    pub fn build_solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::with_viscosity(self.solver.dt, self.solver.viscosity);
        cfg.scheme = self.solver.scheme;
        cfg
    }

    /// Realize the initial data on `grid` for a model with `components`
    /// components (every component receives the same profile). `seed`
    /// only affects the random family.
    pub fn build_initial(
        &self,
        grid: &Grid,
        components: usize,
        seed: u64,
    ) -> Result<SpectralField, QnlsError> {
        match &self.initial {
            InitialData::Gaussian { amplitude, sigma, modulation } => {
                if !modulation.is_empty() && modulation.len() != grid.dim() {
                    return Err(QnlsError::Config(
                        "modulation must have one mode per axis".into(),
                    ));
                }
                let a = *amplitude;
                let s2 = sigma * sigma;
                let m = modulation.clone();
                Ok(SpectralField::from_fn(grid.clone(), components, |_, x| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    let mut phase = 0.0;
                    for (axis, &k) in m.iter().enumerate() {
                        phase +=
                            std::f64::consts::PI * k as f64 / grid.half_width(axis) * x[axis];
                    }
                    a * (-r2 / (2.0 * s2)).exp() * Complex64::new(0.0, phase).exp()
                }))
            }
            InitialData::PlaneWave { amplitude, wavenumbers } => {
                let a = *amplitude;
                let k = wavenumbers.clone();
                Ok(SpectralField::from_fn(grid.clone(), components, |_, x| {
                    let phase: f64 = k
                        .iter()
                        .enumerate()
                        .map(|(axis, &kk)| {
                            std::f64::consts::PI * kk as f64 / grid.half_width(axis) * x[axis]
                        })
                        .sum();
                    a * Complex64::new(0.0, phase).exp()
                }))
            }
            InitialData::RandomBandLimited { amplitude, window_sigma } => {
                let spec = EnsembleSpec {
                    grid: grid.clone(),
                    band_points: grid.points_all().to_vec(),
                    count: components,
                    amplitude: *amplitude,
                    window_sigma: *window_sigma,
                    seed,
                };
                let comps: Vec<Vec<Complex64>> =
                    (0..components).map(|c| spec.sample(c)).collect();
                Ok(SpectralField::from_components(grid.clone(), comps))
            }
        }
    }
}

/// Hash of one produced artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactHash {
    /// File name relative to the run directory.
    pub name: String,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
}

/// Provenance record for one completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// The scenario that was executed.
    pub scenario: Scenario,
    /// RNG seed used.
    pub seed: u64,
    /// Unix timestamp at start.
    pub started_unix: f64,
    /// Wall-clock duration in seconds.
    pub elapsed_secs: f64,
    /// Hashes of every produced file.
    pub artifacts: Vec<ArtifactHash>,
}

impl RunRecord {
    /// Write as pretty JSON.
    pub fn write_json(&self, path: &Path) -> Result<(), QnlsError> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Read back from JSON.
    pub fn read_json(path: &Path) -> Result<Self, QnlsError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
