//! Versioned JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use timo_pigp::beam::{BeamConfig, NoiseLevel};
use timo_pigp::gp::BoundaryCondition;
use timo_pigp::mcmc::{McmcConfig, Prior, PriorSpec};
use timo_pigp::placement::Criterion;
use timo_pigp::QuantityKind;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Replications a study may run without `--full-scale`.
pub const REPLICATION_GUARD: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    pub beam: BeamSpec,
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    #[serde(default)]
    pub bcs: BcSpec,
    #[serde(default)]
    pub priors: PriorsConfig,
    #[serde(default)]
    pub mcmc: McmcSection,
    #[serde(default)]
    pub placement: Option<PlacementSection>,
    #[serde(default)]
    pub predict: PredictSection,
    #[serde(default)]
    pub study: Option<StudySection>,
}

/// Either a full beam description or the unit beam of a given rigidity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BeamSpec {
    Explicit(BeamConfig),
    Rigidity { rigidity: f64 },
}

impl BeamSpec {
    pub fn resolve(&self) -> Result<BeamConfig> {
        match *self {
            BeamSpec::Explicit(cfg) => {
                cfg.validate()?;
                Ok(cfg)
            }
            BeamSpec::Rigidity { rigidity } => Ok(BeamConfig::with_rigidity(rigidity)?),
        }
    }
}

/// Same beam with the shear stiffness changed to reach rigidity `r`.
pub fn with_rigidity_of(beam: &BeamConfig, r: f64) -> Result<BeamConfig> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::Config(format!(
            "rigidity must be positive, got {r}"
        )));
    }
    let kga = 3.0 * beam.ei / (r * beam.length * beam.length);
    Ok(BeamConfig::new(
        beam.length,
        beam.ei,
        kga,
        beam.q0,
        beam.height,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub id: String,
    pub kind: QuantityKind,
    pub locations: Locations,
    /// Strain depths: one per location, or a single value for all.
    #[serde(default)]
    pub depths: Option<Vec<f64>>,
    /// Required except for informed load sets.
    #[serde(default)]
    pub noise: Option<NoiseLevel>,
    /// Repeated measurements per location.
    #[serde(default = "one")]
    pub ndp: usize,
    /// Sample the noise level instead of fixing it.
    #[serde(default = "yes")]
    pub learn_noise: bool,
    /// A load set holding the known applied load rather than measurements.
    #[serde(default)]
    pub informed: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Locations {
    Explicit(Vec<f64>),
    Grid { grid: usize },
    Placement { placement: PlacementRef },
}

/// Sensor set produced by a placement run under this config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementRef {
    pub criterion: Criterion,
    pub domain: QuantityKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BcSpec {
    /// Zero deflection and zero moment at both ends.
    #[default]
    SimplySupported,
    /// Zero deflection at both ends only.
    DeflectionOnly,
    None,
    Custom(Vec<BoundaryCondition>),
}

impl BcSpec {
    pub fn resolve(&self, beam: &BeamConfig) -> Vec<BoundaryCondition> {
        match self {
            BcSpec::SimplySupported => BoundaryCondition::simply_supported(beam.length),
            BcSpec::DeflectionOnly => vec![BoundaryCondition::deflection_supports(beam.length)],
            BcSpec::None => Vec::new(),
            BcSpec::Custom(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorsConfig {
    /// Uniform stiffness priors `U(lo, hi)` relative to the true beam.
    #[serde(default = "default_bounds")]
    pub stiffness_bounds: Option<[f64; 2]>,
    #[serde(default)]
    pub sigma_s2: Prior,
    #[serde(default)]
    pub ell: Prior,
    /// Absolute priors; override `stiffness_bounds` when set.
    #[serde(default)]
    pub ei: Option<Prior>,
    #[serde(default)]
    pub kga: Option<Prior>,
}

fn default_bounds() -> Option<[f64; 2]> {
    Some([0.5, 1.5])
}

impl Default for PriorsConfig {
    fn default() -> Self {
        PriorsConfig {
            stiffness_bounds: default_bounds(),
            sigma_s2: Prior::Flat,
            ell: Prior::Flat,
            ei: None,
            kga: None,
        }
    }
}

impl PriorsConfig {
    pub fn resolve(&self, beam: &BeamConfig) -> Result<PriorSpec> {
        let mut spec = match self.stiffness_bounds {
            Some([lo, hi]) => PriorSpec::bounded_stiffness(beam.ei, beam.kga, lo, hi)?,
            None => PriorSpec::default(),
        };
        spec.sigma_s2 = self.sigma_s2;
        spec.ell = self.ell;
        if let Some(p) = self.ei {
            spec.ei = p;
        }
        if let Some(p) = self.kga {
            spec.kga = p;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McmcSection {
    pub n_total: usize,
    pub n_burn: usize,
    pub n_thin: usize,
    pub adapt: bool,
    pub proposal_scale: Option<Vec<f64>>,
    /// Starting stiffnesses; default to the prior midpoints.
    pub initial_ei: Option<f64>,
    pub initial_kga: Option<f64>,
}

impl Default for McmcSection {
    fn default() -> Self {
        let d = McmcConfig::default();
        McmcSection {
            n_total: d.n_total,
            n_burn: d.n_burn,
            n_thin: d.n_thin,
            adapt: d.adapt,
            proposal_scale: None,
            initial_ei: None,
            initial_kga: None,
        }
    }
}

impl McmcSection {
    pub fn to_config(&self, seed: u64) -> Result<McmcConfig> {
        let cfg = McmcConfig {
            n_total: self.n_total,
            n_burn: self.n_burn,
            n_thin: self.n_thin,
            proposal_scale: self.proposal_scale.clone(),
            seed,
            adapt: self.adapt,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// `n_sensors` per measured quantity.
    #[default]
    PerDomain,
    /// `n_sensors` shared by all quantities on a joint candidate list.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MapMode {
    #[default]
    None,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementSection {
    pub n_points: usize,
    pub n_sensors: usize,
    pub criteria: Vec<Criterion>,
    pub domains: Vec<QuantityKind>,
    pub budget: Budget,
    /// Length scale; defaults to `L/8`.
    pub ell: Option<f64>,
    pub sigma_s2: f64,
    pub entropy_map: MapMode,
    pub max_combos: u64,
    pub map_samples: usize,
}

impl Default for PlacementSection {
    fn default() -> Self {
        PlacementSection {
            n_points: 31,
            n_sensors: 7,
            criteria: Criterion::ALL.to_vec(),
            domains: vec![QuantityKind::Deflection, QuantityKind::Rotation],
            budget: Budget::PerDomain,
            ell: None,
            sigma_s2: 1.0,
            entropy_map: MapMode::None,
            max_combos: 1_000_000,
            map_samples: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrainGrid {
    pub nx: usize,
    /// Depths span `z/h ∈ [-1/2, 1/2]`.
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PredictSection {
    pub quantities: Vec<QuantityKind>,
    pub n_points: usize,
    pub strain_grid: StrainGrid,
    /// Posterior draws entering the mixture, evenly spaced along the chain.
    pub max_draws: usize,
}

impl Default for PredictSection {
    fn default() -> Self {
        PredictSection {
            quantities: QuantityKind::ALL.to_vec(),
            n_points: 101,
            strain_grid: StrainGrid { nx: 31, nz: 11 },
            max_draws: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Signal-to-noise ratio of every measured set.
    Noise,
    /// Beam rigidity `r = 3EI / (kGA L²)`.
    Rigidity,
    /// Repeated measurements per location.
    Ndp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub kind: StudyKind,
    pub values: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Replications used under `--full-scale`.
    #[serde(default = "full_replications")]
    pub full_scale_replications: usize,
    /// Also run each replication without boundary conditions.
    #[serde(default)]
    pub compare_bcs: bool,
}

fn default_replications() -> usize {
    50
}

fn full_replications() -> usize {
    1000
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let beam = self.beam.resolve()?;
        let mut seen = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if !seen.insert(d.id.as_str()) {
                return Err(CliError::Config(format!("duplicate dataset id `{}`", d.id)));
            }
            if d.id.is_empty() || d.id.contains(',') {
                return Err(CliError::Config(format!("invalid dataset id `{}`", d.id)));
            }
            if d.ndp == 0 {
                return Err(CliError::Config(format!(
                    "dataset `{}`: ndp must be at least 1",
                    d.id
                )));
            }
            if d.informed && d.kind != QuantityKind::Load {
                return Err(CliError::Config(format!(
                    "dataset `{}`: only load sets can be informed",
                    d.id
                )));
            }
            if !d.informed && d.noise.is_none() {
                return Err(CliError::Config(format!(
                    "dataset `{}` needs a noise level",
                    d.id
                )));
            }
            if let Locations::Placement { placement } = &d.locations {
                if self.placement.is_none() {
                    return Err(CliError::Config(format!(
                        "dataset `{}` refers to a placement but the config has no placement section",
                        d.id
                    )));
                }
                if placement.domain != d.kind && d.kind != QuantityKind::Load {
                    return Err(CliError::Config(format!(
                        "dataset `{}` of kind {} uses sensors placed for {}",
                        d.id, d.kind, placement.domain
                    )));
                }
            }
        }
        self.priors.resolve(&beam)?;
        self.mcmc.to_config(0)?;
        if let Some(p) = &self.placement {
            if p.n_points == 0 {
                return Err(CliError::Config(
                    "placement needs at least one candidate".into(),
                ));
            }
            if p.domains.is_empty() || p.criteria.is_empty() {
                return Err(CliError::Config(
                    "placement needs at least one domain and criterion".into(),
                ));
            }
            if p.domains.contains(&QuantityKind::Strain) {
                return Err(CliError::Config("strain is not a placement domain".into()));
            }
        }
        let g = self.predict.strain_grid;
        if self.predict.n_points < 2 || g.nx < 2 || g.nz < 2 || self.predict.max_draws == 0 {
            return Err(CliError::Config(
                "prediction grids need at least two points and one draw".into(),
            ));
        }
        if let Some(s) = &self.study {
            if s.values.is_empty() || s.replications == 0 {
                return Err(CliError::Config(
                    "study needs sweep values and replications".into(),
                ));
            }
            if s.kind == StudyKind::Ndp && s.values.iter().any(|v| *v < 1.0 || v.fract() != 0.0) {
                return Err(CliError::Config(
                    "ndp sweep values must be positive integers".into(),
                ));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (defaults filled in).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}
