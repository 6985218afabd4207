//! Closed-form static response of a simply supported Timoshenko beam under a
//! uniformly distributed load, and synthetic measurements drawn from it.
//!
//! Sign convention: `q = EI w_b''''`, `M = EI w_b''`, `V = M'`,
//! `φ = w_b' - V/kGA`, `w = w_b + w_s` with `w_s = -M/kGA`, and
//! `ε = -z φ'`. A positive `q0` produces positive midspan deflection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{Dataset, NoiseModel};
use crate::kernels::QuantityKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    /// Span length [m].
    pub length: f64,
    /// Bending stiffness [N m²].
    pub ei: f64,
    /// Shear stiffness [N].
    pub kga: f64,
    /// Uniformly distributed load [N/m].
    pub q0: f64,
    /// Section height [m].
    pub height: f64,
}

impl BeamConfig {
    pub fn new(length: f64, ei: f64, kga: f64, q0: f64, height: f64) -> Result<Self> {
        let cfg = BeamConfig {
            length,
            ei,
            kga,
            q0,
            height,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Beam with unit length, bending stiffness and load whose shear
    /// stiffness is chosen to give rigidity `r`.
    pub fn with_rigidity(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("rigidity must be positive, got {r}")));
        }
        BeamConfig::new(1.0, 1.0, 3.0 / r, 1.0, 0.1)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("length", self.length)?;
        positive("EI", self.ei)?;
        positive("kGA", self.kga)?;
        positive("height", self.height)?;
        if !self.q0.is_finite() {
            return Err(Error::Domain(format!("q0 must be finite, got {}", self.q0)));
        }
        Ok(())
    }

    pub fn rigidity(&self) -> f64 {
        3.0 * self.ei / (self.length * self.length * self.kga)
    }

    /// `n` equidistant points spanning `[0, L]`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * self.length],
            _ => (0..n)
                .map(|i| self.length * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// A single evaluated field value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub quantity: QuantityKind,
    pub x: f64,
    pub z: Option<f64>,
    pub value: f64,
}

/// Measurement noise for synthetic data: either relative to the peak
/// response (`σ = max|field| / snr`) or an absolute standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLevel {
    Snr(f64),
    SigmaN(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub level: NoiseLevel,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn snr(snr: f64, seed: u64) -> Self {
        NoiseSpec {
            level: NoiseLevel::Snr(snr),
            seed,
        }
    }

    pub fn sigma(sigma_n: f64, seed: u64) -> Self {
        NoiseSpec {
            level: NoiseLevel::SigmaN(sigma_n),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.level {
            NoiseLevel::Snr(s) if s > 0.0 => Ok(()),
            NoiseLevel::SigmaN(s) if s >= 0.0 && s.is_finite() => Ok(()),
            other => Err(Error::Argument(format!("invalid noise level {other:?}"))),
        }
    }

    /// Noise standard deviation for a field whose peak magnitude is `peak`.
    pub fn std_dev(&self, peak: f64) -> f64 {
        match self.level {
            NoiseLevel::Snr(s) if s.is_infinite() => 0.0,
            NoiseLevel::Snr(s) => peak / s,
            NoiseLevel::SigmaN(s) => s,
        }
    }
}

pub fn rigidity_factor(ei: f64, length: f64, kga: f64) -> Result<f64> {
    if !(ei > 0.0 && length > 0.0 && kga > 0.0) {
        return Err(Error::Domain(format!(
            "rigidity factor needs positive inputs, got EI={ei}, L={length}, kGA={kga}"
        )));
    }
    Ok(3.0 * ei / (length * length * kga))
}

fn check_position(cfg: &BeamConfig, x: f64) -> Result<()> {
    let tol = 1e-12 * cfg.length;
    if x.is_finite() && x >= -tol && x <= cfg.length + tol {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "position {x} outside [0, {}]",
            cfg.length
        )))
    }
}

fn bending_deflection(cfg: &BeamConfig, x: f64) -> f64 {
    let l = cfg.length;
    cfg.q0 / (24.0 * cfg.ei) * (x.powi(4) - 2.0 * l * x.powi(3) + l.powi(3) * x)
}

fn bending_rotation(cfg: &BeamConfig, x: f64) -> f64 {
    let l = cfg.length;
    cfg.q0 / (24.0 * cfg.ei) * (4.0 * x.powi(3) - 6.0 * l * x * x + l.powi(3))
}

fn moment(cfg: &BeamConfig, x: f64) -> f64 {
    0.5 * cfg.q0 * (x * x - cfg.length * x)
}

fn shear(cfg: &BeamConfig, x: f64) -> f64 {
    cfg.q0 * (x - 0.5 * cfg.length)
}

/// Deflection split into its bending and shear parts at `x`.
pub fn deflection_parts(cfg: &BeamConfig, x: f64) -> Result<(f64, f64)> {
    check_position(cfg, x)?;
    Ok((bending_deflection(cfg, x), -moment(cfg, x) / cfg.kga))
}

/// Closed-form Timoshenko response. `z` is required for strain only.
pub fn analytic_field(
    cfg: &BeamConfig,
    quantity: QuantityKind,
    x: f64,
    z: Option<f64>,
) -> Result<f64> {
    check_position(cfg, x)?;
    let value = match quantity {
        QuantityKind::Deflection => bending_deflection(cfg, x) - moment(cfg, x) / cfg.kga,
        QuantityKind::Rotation => bending_rotation(cfg, x) - shear(cfg, x) / cfg.kga,
        QuantityKind::Strain => {
            let z = z.ok_or_else(|| Error::Argument("strain requires a depth z".into()))?;
            -z * (moment(cfg, x) / cfg.ei - cfg.q0 / cfg.kga)
        }
        QuantityKind::Moment => moment(cfg, x),
        QuantityKind::Shear => shear(cfg, x),
        QuantityKind::Load => cfg.q0,
    };
    Ok(value)
}

/// Euler-Bernoulli counterpart of [`analytic_field`] (rigid in shear).
pub fn bernoulli_field(
    cfg: &BeamConfig,
    quantity: QuantityKind,
    x: f64,
    z: Option<f64>,
) -> Result<f64> {
    let rigid = BeamConfig {
        kga: f64::INFINITY,
        ..*cfg
    };
    check_position(cfg, x)?;
    match quantity {
        QuantityKind::Strain if z.is_none() => {
            Err(Error::Argument("strain requires a depth z".into()))
        }
        _ => analytic_field(&rigid, quantity, x, z),
    }
}

pub fn sample(
    cfg: &BeamConfig,
    quantity: QuantityKind,
    x: f64,
    z: Option<f64>,
) -> Result<FieldSample> {
    Ok(FieldSample {
        quantity,
        x,
        z,
        value: analytic_field(cfg, quantity, x, z)?,
    })
}

/// Share of the midspan deflection caused by shear.
pub fn shear_fraction(cfg: &BeamConfig) -> Result<f64> {
    cfg.validate()?;
    let (wb, ws) = deflection_parts(cfg, 0.5 * cfg.length)?;
    Ok(ws / (wb + ws))
}

/// Largest magnitude of a field over the span (at depth `z` for strain).
///
/// The SS+UDL fields are polynomials of degree ≤ 4 whose extrema lie at the
/// supports, at midspan or nowhere else, so a fine grid including those
/// points is exact up to rounding.
pub fn peak_magnitude(cfg: &BeamConfig, quantity: QuantityKind, z: Option<f64>) -> Result<f64> {
    let n = 401;
    let mut peak = 0.0f64;
    for x in cfg.grid(n) {
        peak = peak.max(analytic_field(cfg, quantity, x, z)?.abs());
    }
    Ok(peak)
}

/// Samples the analytic field at `locations` and adds i.i.d. Gaussian noise.
///
/// For strain, `depths` must have one entry per location. The returned
/// dataset carries `NoiseModel::Fixed` with the noise level actually used.
pub fn synthesize_dataset(
    cfg: &BeamConfig,
    quantity: QuantityKind,
    locations: &[f64],
    depths: Option<&[f64]>,
    noise: &NoiseSpec,
    label: &str,
) -> Result<Dataset> {
    cfg.validate()?;
    noise.validate()?;
    if locations.is_empty() {
        return Err(Error::Argument("no measurement locations given".into()));
    }
    let depths = match (quantity.needs_depth(), depths) {
        (true, Some(d)) if d.len() == locations.len() => Some(d.to_vec()),
        (true, Some(d)) => {
            return Err(Error::Argument(format!(
                "{} depths for {} locations",
                d.len(),
                locations.len()
            )))
        }
        (true, None) => {
            return Err(Error::Argument(
                "strain requires a depth per location".into(),
            ))
        }
        (false, _) => None,
    };

    let clean = locations
        .iter()
        .enumerate()
        .map(|(i, &x)| analytic_field(cfg, quantity, x, depths.as_ref().map(|d| d[i])))
        .collect::<Result<Vec<_>>>()?;

    let peak = match &depths {
        // peak over the deepest fibre requested
        Some(d) => {
            let zmax = d.iter().fold(0.0f64, |m, z| m.max(z.abs()));
            peak_magnitude(cfg, quantity, Some(zmax))?
        }
        None => peak_magnitude(cfg, quantity, None)?,
    };
    let sigma = noise.std_dev(peak);

    let y = if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::Argument(e.to_string()))?;
        clean.iter().map(|v| v + normal.sample(&mut rng)).collect()
    } else {
        clean
    };

    Dataset::new(
        quantity,
        locations.to_vec(),
        depths,
        y,
        NoiseModel::Fixed(sigma),
        label,
    )
}
