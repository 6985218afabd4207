//! Joint covariance assembly, marginal likelihood and prediction for the
//! multi-output beam GP.
//!
//! Observations are stacked block-wise in the order `w, φ, ε, M, V, q`; inside
//! a block, measurement datasets come first in declaration order, followed by
//! boundary-condition datasets. Noise enters the diagonal only.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel, prior_variance, KernelParams, QuantityKind};

/// Relative diagonal jitter tried in turn until Cholesky succeeds.
pub const JITTER_LADDER: [f64; 4] = [1e-12, 1e-10, 1e-8, 1e-6];

/// Relative size of the fixed noise used to inform the model of a known load.
pub const INFORMED_LOAD_NOISE: f64 = 1e-6;

/// Noise standard deviation of a dataset: known, or a hyperparameter with an
/// initial value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    Fixed(f64),
    Learn(f64),
}

impl NoiseModel {
    pub fn value(&self) -> f64 {
        match *self {
            NoiseModel::Fixed(s) | NoiseModel::Learn(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub kind: QuantityKind,
    pub x: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub y: Vec<f64>,
    pub noise: NoiseModel,
    pub label: String,
}

impl Dataset {
    pub fn new(
        kind: QuantityKind,
        x: Vec<f64>,
        z: Option<Vec<f64>>,
        y: Vec<f64>,
        noise: NoiseModel,
        label: impl Into<String>,
    ) -> Result<Self> {
        let d = Dataset {
            kind,
            x,
            z,
            y,
            noise,
            label: label.into(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() {
            return Err(Error::Argument(format!(
                "dataset `{}` is empty",
                self.label
            )));
        }
        if self.x.len() != self.y.len() {
            return Err(Error::Argument(format!(
                "dataset `{}`: {} locations but {} values",
                self.label,
                self.x.len(),
                self.y.len()
            )));
        }
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "dataset `{}` has non-finite entries",
                self.label
            )));
        }
        match (&self.z, self.kind.needs_depth()) {
            (Some(z), _) if z.len() != self.x.len() => {
                return Err(Error::Argument(format!(
                    "dataset `{}`: {} depths for {} locations",
                    self.label,
                    z.len(),
                    self.x.len()
                )))
            }
            (None, true) => {
                return Err(Error::Argument(format!(
                    "strain dataset `{}` requires depths",
                    self.label
                )))
            }
            _ => {}
        }
        let s = self.noise.value();
        let ok = match self.noise {
            NoiseModel::Fixed(_) => s >= 0.0 && s.is_finite(),
            NoiseModel::Learn(_) => s > 0.0 && s.is_finite(),
        };
        if !ok {
            return Err(Error::Argument(format!(
                "dataset `{}` has invalid noise {:?}",
                self.label, self.noise
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn depth(&self, i: usize) -> f64 {
        self.z.as_ref().map_or(0.0, |z| z[i])
    }

    /// Dataset informing the model of a known uniform load at `locations`.
    pub fn informed_load(q0: f64, locations: &[f64], label: impl Into<String>) -> Result<Self> {
        Dataset::new(
            QuantityKind::Load,
            locations.to_vec(),
            None,
            vec![q0; locations.len()],
            NoiseModel::Fixed(INFORMED_LOAD_NOISE * q0.abs()),
            label,
        )
    }
}

/// Noise-free pseudo-observations enforcing support conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub kind: QuantityKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BoundaryCondition {
    pub fn new(kind: QuantityKind, x: Vec<f64>, y: Vec<f64>) -> Self {
        BoundaryCondition { kind, x, y }
    }

    /// `w(0) = w(L) = 0`.
    pub fn deflection_supports(length: f64) -> Self {
        BoundaryCondition::new(QuantityKind::Deflection, vec![0.0, length], vec![0.0, 0.0])
    }

    /// `M(0) = M(L) = 0`.
    pub fn zero_end_moments(length: f64) -> Self {
        BoundaryCondition::new(QuantityKind::Moment, vec![0.0, length], vec![0.0, 0.0])
    }

    /// Both support conditions of a simply supported span. With deflection
    /// supports alone, a change of `kGA` is absorbed exactly by the free
    /// quadratic and constant terms of the bending deflection, so the shear
    /// stiffness is then informed only by the prior.
    pub fn simply_supported(length: f64) -> Vec<Self> {
        vec![
            Self::deflection_supports(length),
            Self::zero_end_moments(length),
        ]
    }

    pub fn to_dataset(&self) -> Result<Dataset> {
        if self.kind.needs_depth() {
            return Err(Error::Argument(
                "strain boundary conditions are not supported".into(),
            ));
        }
        Dataset::new(
            self.kind,
            self.x.clone(),
            None,
            self.y.clone(),
            NoiseModel::Fixed(0.0),
            format!("bc:{}", self.kind),
        )
    }
}

/// Hyperparameters of the model. `sigma_n` holds the noise standard
/// deviation of every dataset with a learned noise model, keyed by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub sigma_s2: f64,
    pub ell: f64,
    pub ei: f64,
    pub kga: f64,
    #[serde(default)]
    pub sigma_n: BTreeMap<String, f64>,
}

impl Theta {
    pub fn new(sigma_s2: f64, ell: f64, ei: f64, kga: f64) -> Self {
        Theta {
            sigma_s2,
            ell,
            ei,
            kga,
            sigma_n: BTreeMap::new(),
        }
    }

    pub fn with_noise(mut self, label: impl Into<String>, sigma: f64) -> Self {
        self.sigma_n.insert(label.into(), sigma);
        self
    }

    /// Adds a noise entry for every learned-noise dataset missing one, using
    /// the dataset's initial value.
    pub fn fill_noise_from(mut self, datasets: &[Dataset]) -> Self {
        for d in datasets {
            if let NoiseModel::Learn(s) = d.noise {
                self.sigma_n.entry(d.label.clone()).or_insert(s);
            }
        }
        self
    }

    pub fn kernel_params(&self) -> KernelParams {
        KernelParams::new(self.sigma_s2, self.ell, self.ei, self.kga)
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel_params().validate()?;
        if let Some((k, v)) = self
            .sigma_n
            .iter()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::Domain(format!(
                "noise `{k}` must be positive, got {v}"
            )));
        }
        Ok(())
    }

    fn noise_for(&self, d: &Dataset) -> Result<f64> {
        match d.noise {
            NoiseModel::Fixed(s) => Ok(s),
            NoiseModel::Learn(_) => self.sigma_n.get(&d.label).copied().ok_or_else(|| {
                Error::Argument(format!(
                    "theta has no noise entry for dataset `{}`",
                    d.label
                ))
            }),
        }
    }
}

/// One row of the joint covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub kind: QuantityKind,
    pub x: f64,
    pub z: f64,
    pub noise_sd: f64,
}

/// Orders datasets into covariance blocks; returns `(dataset, is_bc)` pairs.
fn block_order<'a>(datasets: &'a [Dataset], bcs: &'a [Dataset]) -> Vec<&'a Dataset> {
    let mut tagged: Vec<(usize, bool, &Dataset)> = datasets
        .iter()
        .map(|d| (d.kind.block_index(), false, d))
        .chain(bcs.iter().map(|d| (d.kind.block_index(), true, d)))
        .collect();
    tagged.sort_by_key(|(block, is_bc, _)| (*block, *is_bc));
    tagged.into_iter().map(|(_, _, d)| d).collect()
}

/// Flattens datasets and boundary conditions into observations and targets.
pub fn stack(
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    theta: &Theta,
) -> Result<(Vec<Observation>, Vec<f64>)> {
    let bc_sets = bcs
        .iter()
        .map(BoundaryCondition::to_dataset)
        .collect::<Result<Vec<_>>>()?;
    let mut obs = Vec::new();
    let mut y = Vec::new();
    for d in block_order(datasets, &bc_sets) {
        d.validate()?;
        let sd = theta.noise_for(d)?;
        for i in 0..d.len() {
            obs.push(Observation {
                kind: d.kind,
                x: d.x[i],
                z: d.depth(i),
                noise_sd: sd,
            });
            y.push(d.y[i]);
        }
    }
    Ok((obs, y))
}

/// Kernel matrix between two observation lists (no noise).
pub fn cross_covariance(
    rows: &[Observation],
    cols: &[Observation],
    params: &KernelParams,
) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        let (a, b) = (&rows[i], &cols[j]);
        kernel(a.kind, b.kind, a.x, b.x, &params.with_depths(a.z, b.z))
    })
}

/// Prior covariance of `obs` with noise variances on the diagonal.
pub fn noisy_covariance(obs: &[Observation], params: &KernelParams) -> DMatrix<f64> {
    let n = obs.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (a, b) = (&obs[i], &obs[j]);
            let v = kernel(a.kind, b.kind, a.x, b.x, &params.with_depths(a.z, b.z));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += obs[i].noise_sd * obs[i].noise_sd;
    }
    k
}

/// Jitter unit for an observation: its prior variance, or `σ_s²` when that
/// vanishes (strain on the neutral axis).
fn jitter_unit(o: &Observation, params: &KernelParams) -> f64 {
    let v = prior_variance(o.kind, o.z, params);
    if v > 0.0 && v.is_finite() {
        v
    } else {
        params.sigma_s2
    }
}

/// Factorizes `k + jitter·diag(unit)` walking up [`JITTER_LADDER`].
pub fn factorize(k: &DMatrix<f64>, units: &[f64]) -> Result<(Cholesky<f64, Dyn>, f64)> {
    for &rel in JITTER_LADDER.iter() {
        let mut kj = k.clone();
        for (i, u) in units.iter().enumerate() {
            kj[(i, i)] += rel * u;
        }
        if let Some(chol) = Cholesky::new(kj) {
            return Ok((chol, rel));
        }
    }
    Err(Error::IllConditioned {
        ladder: JITTER_LADDER.to_vec(),
    })
}

/// The assembled joint covariance of a set of observations with its
/// Cholesky factor. Immutable once built.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    params: KernelParams,
    obs: Vec<Observation>,
    y: DVector<f64>,
    k: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
    jitter_units: Vec<f64>,
}

/// Summary of a factorization, written to diagnostics JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDiagnostics {
    pub n: usize,
    pub jitter: f64,
    pub condition_estimate: f64,
    pub log_likelihood: f64,
}

pub fn assemble(
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    theta: &Theta,
) -> Result<CovarianceModel> {
    theta.validate()?;
    let (obs, y) = stack(datasets, bcs, theta)?;
    if obs.is_empty() {
        return Err(Error::Argument(
            "no datasets or boundary conditions to assemble".into(),
        ));
    }
    CovarianceModel::from_observations(obs, y, theta.kernel_params())
}

impl CovarianceModel {
    pub fn from_observations(
        obs: Vec<Observation>,
        y: Vec<f64>,
        params: KernelParams,
    ) -> Result<Self> {
        params.validate()?;
        if obs.len() != y.len() {
            return Err(Error::Argument(format!(
                "{} observations but {} targets",
                obs.len(),
                y.len()
            )));
        }
        if obs.iter().any(|o| !o.x.is_finite() || !o.z.is_finite()) {
            return Err(Error::Argument(
                "observation locations must be finite".into(),
            ));
        }
        let k = noisy_covariance(&obs, &params);
        let units: Vec<f64> = obs.iter().map(|o| jitter_unit(o, &params)).collect();
        let (chol, jitter) = factorize(&k, &units)?;
        let y = DVector::from_vec(y);
        let alpha = chol.solve(&y);
        Ok(CovarianceModel {
            params,
            obs,
            y,
            k,
            chol,
            alpha,
            jitter,
            jitter_units: units,
        })
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Relative jitter rung that made the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Absolute jitter added to diagonal entry `i`.
    pub fn jitter_at(&self, i: usize) -> f64 {
        self.jitter * self.jitter_units[i]
    }

    /// Covariance with noise but without jitter.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// Covariance as factorized (noise and jitter).
    pub fn factorized_covariance(&self) -> DMatrix<f64> {
        let mut k = self.k.clone();
        for i in 0..k.nrows() {
            k[(i, i)] += self.jitter_at(i);
        }
        k
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self
            .chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>()
    }

    /// Squared ratio of the extreme Cholesky pivots; a cheap lower bound on
    /// the 2-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let d = self.chol.l_dirty().diagonal();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        (hi / lo).powi(2)
    }

    pub fn diagnostics(&self) -> ModelDiagnostics {
        ModelDiagnostics {
            n: self.len(),
            jitter: self.jitter,
            condition_estimate: self.condition_estimate(),
            log_likelihood: log_marginal_likelihood(self, self.y.as_slice()).unwrap_or(f64::NAN),
        }
    }

    /// Posterior mean and variance at arbitrary observation sites.
    pub fn posterior(&self, targets: &[Observation]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let ks = cross_covariance(&self.obs, targets, &self.params);
        let mean = ks.transpose() * &self.alpha;
        let v = self
            .chol
            .l_dirty()
            .lower_triangle()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let prior: Vec<f64> = targets
            .iter()
            .map(|t| kernel(t.kind, t.kind, t.x, t.x, &self.params.with_depths(t.z, t.z)))
            .collect();
        let var = prior
            .iter()
            .enumerate()
            .map(|(j, kss)| kss - v.column(j).norm_squared())
            .collect();
        (mean.as_slice().to_vec(), var, prior)
    }
}

pub fn log_marginal_likelihood(model: &CovarianceModel, y_all: &[f64]) -> Result<f64> {
    if y_all.len() != model.len() {
        return Err(Error::Argument(format!(
            "target vector has {} entries, model has {}",
            y_all.len(),
            model.len()
        )));
    }
    let y = DVector::from_column_slice(y_all);
    let alpha = model.chol.solve(&y);
    let n = y_all.len() as f64;
    Ok(-0.5 * y.dot(&alpha) - 0.5 * model.log_det() - 0.5 * n * (2.0 * PI).ln())
}

/// Predictive distribution of one quantity at a set of locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub kind: QuantityKind,
    pub x: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    /// Number of variances below `-1e-10·k**` before clamping.
    #[serde(default)]
    pub conditioning_warnings: usize,
}

pub(crate) fn query_sites(
    kind: QuantityKind,
    x_star: &[f64],
    z_star: Option<&[f64]>,
) -> Result<Vec<Observation>> {
    match (kind.needs_depth(), z_star) {
        (true, None) => {
            return Err(Error::Argument(
                "strain predictions need query depths".into(),
            ))
        }
        (_, Some(z)) if z.len() != x_star.len() => {
            return Err(Error::Argument(format!(
                "{} query depths for {} locations",
                z.len(),
                x_star.len()
            )))
        }
        _ => {}
    }
    Ok(x_star
        .iter()
        .enumerate()
        .map(|(i, &x)| Observation {
            kind,
            x,
            z: z_star.map_or(0.0, |z| z[i]),
            noise_sd: 0.0,
        })
        .collect())
}

pub fn predict(
    model: &CovarianceModel,
    kind: QuantityKind,
    x_star: &[f64],
    z_star: Option<&[f64]>,
) -> Result<Prediction> {
    let sites = query_sites(kind, x_star, z_star)?;
    let (mean, raw_var, prior) = model.posterior(&sites);
    let mut warnings = 0;
    let var = raw_var
        .iter()
        .zip(&prior)
        .map(|(&v, &kss)| {
            if v < -1e-10 * kss.abs() {
                warnings += 1;
            }
            v.max(0.0)
        })
        .collect();
    Ok(Prediction {
        kind,
        x: x_star.to_vec(),
        z: z_star.map(<[f64]>::to_vec),
        mean,
        var,
        conditioning_warnings: warnings,
    })
}

/// Assembles the model for `theta` and predicts.
pub fn predict_with(
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    theta: &Theta,
    kind: QuantityKind,
    x_star: &[f64],
    z_star: Option<&[f64]>,
) -> Result<Prediction> {
    let model = assemble(datasets, bcs, theta)?;
    predict(&model, kind, x_star, z_star)
}

/// Moment-matched mixture of per-draw predictions: the mean of the means,
/// and the mean variance plus the variance of the means.
pub fn combine_mixture(parts: &[Prediction]) -> Result<Prediction> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Argument("mixture needs at least one component".into()))?;
    let m = first.mean.len();
    let n = parts.len() as f64;
    let mut mean = vec![0.0; m];
    for p in parts {
        for (acc, v) in mean.iter_mut().zip(&p.mean) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut var = vec![0.0; m];
    for p in parts {
        for j in 0..m {
            let d = p.mean[j] - mean[j];
            var[j] += p.var[j] + d * d;
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    Ok(Prediction {
        kind: first.kind,
        x: first.x.clone(),
        z: first.z.clone(),
        mean,
        var,
        conditioning_warnings: parts.iter().map(|p| p.conditioning_warnings).sum(),
    })
}

/// Fully Bayesian prediction averaged over posterior draws.
pub fn predict_mixture(
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    draws: &[Theta],
    kind: QuantityKind,
    x_star: &[f64],
    z_star: Option<&[f64]>,
) -> Result<Prediction> {
    if draws.is_empty() {
        return Err(Error::Argument("posterior chain is empty".into()));
    }
    query_sites(kind, x_star, z_star)?;
    let parts = draws
        .par_iter()
        .map(|theta| predict_with(datasets, bcs, theta, kind, x_star, z_star))
        .collect::<Result<Vec<_>>>()?;
    combine_mixture(&parts)
}
