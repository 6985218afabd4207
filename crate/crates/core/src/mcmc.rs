//! Random-walk Metropolis-Hastings over the GP hyperparameters.
//!
//! Positive scale parameters (`σ_s²`, `ℓ`, every `σ_n`) are sampled in log
//! space; the stiffnesses are sampled in linear space because their priors are
//! bounded-uniform in physical units. The proposal is a symmetric Gaussian, so
//! the proposal-density ratio cancels from the acceptance probability.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{assemble, log_marginal_likelihood, BoundaryCondition, Dataset, NoiseModel, Theta};
use crate::kernels::QuantityKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    /// Improper uniform prior on the positive half-line.
    #[default]
    Flat,
    UniformBounded {
        lo: f64,
        hi: f64,
    },
}

impl Prior {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Prior::UniformBounded { lo, hi })
        } else {
            Err(Error::Argument(format!(
                "uniform prior needs lo < hi, got ({lo}, {hi})"
            )))
        }
    }

    pub fn log_density(&self, v: f64) -> f64 {
        match *self {
            Prior::Flat if v > 0.0 && v.is_finite() => 0.0,
            Prior::UniformBounded { lo, hi } if v >= lo && v <= hi && v > 0.0 => -(hi - lo).ln(),
            _ => f64::NEG_INFINITY,
        }
    }

    fn midpoint(&self) -> Option<f64> {
        match *self {
            Prior::UniformBounded { lo, hi } => Some(0.5 * (lo + hi)),
            Prior::Flat => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PriorSpec {
    #[serde(default)]
    pub sigma_s2: Prior,
    #[serde(default)]
    pub ell: Prior,
    #[serde(default)]
    pub ei: Prior,
    #[serde(default)]
    pub kga: Prior,
    /// Priors of learned noise levels; missing labels are flat.
    #[serde(default)]
    pub noise: BTreeMap<String, Prior>,
}

impl PriorSpec {
    /// Flat priors everywhere except `U(lo, hi)·true` on both stiffnesses.
    pub fn bounded_stiffness(ei_true: f64, kga_true: f64, lo: f64, hi: f64) -> Result<Self> {
        Ok(PriorSpec {
            ei: Prior::uniform(lo * ei_true, hi * ei_true)?,
            kga: Prior::uniform(lo * kga_true, hi * kga_true)?,
            ..PriorSpec::default()
        })
    }

    pub fn log_density(&self, theta: &Theta) -> f64 {
        let mut lp = self.sigma_s2.log_density(theta.sigma_s2)
            + self.ell.log_density(theta.ell)
            + self.ei.log_density(theta.ei)
            + self.kga.log_density(theta.kga);
        for (label, s) in &theta.sigma_n {
            lp += self
                .noise
                .get(label)
                .copied()
                .unwrap_or_default()
                .log_density(*s);
        }
        lp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Log,
    Linear,
}

impl Transform {
    fn forward(self, v: f64) -> f64 {
        match self {
            Transform::Log => v.ln(),
            Transform::Linear => v,
        }
    }

    fn inverse(self, u: f64) -> f64 {
        match self {
            Transform::Log => u.exp(),
            Transform::Linear => u,
        }
    }

    /// `ln |dθ/du|`.
    fn log_jacobian(self, u: f64) -> f64 {
        match self {
            Transform::Log => u,
            Transform::Linear => 0.0,
        }
    }
}

/// Ordered parameter names and sampling transforms of a [`Theta`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamLayout {
    pub names: Vec<String>,
    pub transforms: Vec<Transform>,
    noise_labels: Vec<String>,
}

impl ParamLayout {
    pub fn for_theta(theta: &Theta) -> Self {
        let noise_labels: Vec<String> = theta.sigma_n.keys().cloned().collect();
        let mut names: Vec<String> = ["sigma_s2", "ell", "EI", "kGA"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        names.extend(noise_labels.iter().map(|l| format!("sigma_n:{l}")));
        let mut transforms = vec![
            Transform::Log,
            Transform::Log,
            Transform::Linear,
            Transform::Linear,
        ];
        transforms.extend(std::iter::repeat_n(Transform::Log, noise_labels.len()));
        ParamLayout {
            names,
            transforms,
            noise_labels,
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn values(&self, theta: &Theta) -> Vec<f64> {
        let mut v = vec![theta.sigma_s2, theta.ell, theta.ei, theta.kga];
        v.extend(self.noise_labels.iter().map(|l| theta.sigma_n[l]));
        v
    }

    pub fn theta(&self, values: &[f64]) -> Theta {
        let mut t = Theta::new(values[0], values[1], values[2], values[3]);
        for (l, v) in self.noise_labels.iter().zip(&values[4..]) {
            t.sigma_n.insert(l.clone(), *v);
        }
        t
    }

    pub fn to_unconstrained(&self, theta: &Theta) -> Vec<f64> {
        self.values(theta)
            .iter()
            .zip(&self.transforms)
            .map(|(v, t)| t.forward(*v))
            .collect()
    }

    pub fn from_unconstrained(&self, u: &[f64]) -> Theta {
        let v: Vec<f64> = u
            .iter()
            .zip(&self.transforms)
            .map(|(u, t)| t.inverse(*u))
            .collect();
        self.theta(&v)
    }

    pub fn log_jacobian(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(&self.transforms)
            .map(|(u, t)| t.log_jacobian(*u))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub n_total: usize,
    pub n_burn: usize,
    pub n_thin: usize,
    /// Random-walk step per parameter in sampling coordinates. Derived from
    /// the priors when absent.
    #[serde(default)]
    pub proposal_scale: Option<Vec<f64>>,
    pub seed: u64,
    /// Tune the proposal scales during burn-in; they are frozen afterwards.
    pub adapt: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_total: 25_000,
            n_burn: 5_000,
            n_thin: 10,
            proposal_scale: None,
            seed: 0,
            adapt: true,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_burn >= self.n_total {
            return Err(Error::Argument(format!(
                "burn-in {} must be shorter than the chain length {}",
                self.n_burn, self.n_total
            )));
        }
        if self.n_thin == 0 {
            return Err(Error::Argument("thinning stride must be at least 1".into()));
        }
        if let Some(s) = &self.proposal_scale {
            if s.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(Error::Argument(
                    "proposal scales must be finite and non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Consecutive rejections after which the chain is declared stuck.
    pub fn stuck_limit(&self) -> usize {
        10 * self.n_burn.max(100)
    }
}

/// Target acceptance band for burn-in adaptation.
pub const TARGET_ACCEPTANCE: (f64, f64) = (0.25, 0.40);

const ADAPT_WINDOW: usize = 100;

/// Output of the generic sampler in sampling coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RawChain {
    /// Retained states (after burn-in and thinning).
    pub samples: Vec<Vec<f64>>,
    pub log_density: Vec<f64>,
    /// Acceptance rate over the post-burn-in iterations.
    pub acceptance_rate: f64,
    pub burn_in_acceptance: f64,
    /// Proposal scales used after burn-in.
    pub scales: Vec<f64>,
}

/// The acceptance rule: accept when `p ≥ a` with `p = min(1, exp(log_ratio))`.
pub fn accept(log_ratio: f64, a: f64) -> bool {
    !log_ratio.is_nan()
        && log_ratio > f64::NEG_INFINITY
        && (log_ratio >= 0.0 || log_ratio.exp() >= a)
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Random-walk MH on an arbitrary log density in unconstrained coordinates.
///
/// Visits states `θ_0 .. θ_{N-1}` (`θ_0 = x0`) and keeps
/// `θ_{n_b}, θ_{n_b + n_t}, …`.
pub fn sample<F>(
    mut log_density: F,
    x0: &[f64],
    scales: &[f64],
    cfg: &McmcConfig,
) -> Result<RawChain>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let d = x0.len();
    if scales.len() != d {
        return Err(Error::Argument(format!(
            "{} proposal scales for {} parameters",
            scales.len(),
            d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = x0.to_vec();
    let mut lp = log_density(&current);
    if !lp.is_finite() {
        return Err(Error::Argument(
            "initial state has zero posterior density".into(),
        ));
    }

    let mut scales = scales.to_vec();
    let mut global = 1.0f64;
    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut window_accepts = 0usize;
    let mut burn_accepts = 0usize;
    let mut post_accepts = 0usize;
    let mut rejected_run = 0usize;

    let mut samples = Vec::new();
    let mut kept_lp = Vec::new();
    let mut proposal = vec![0.0; d];

    for i in 0..cfg.n_total {
        if i >= cfg.n_burn && (i - cfg.n_burn).is_multiple_of(cfg.n_thin) {
            samples.push(current.clone());
            kept_lp.push(lp);
        }
        if i + 1 == cfg.n_total {
            break;
        }

        for k in 0..d {
            let eps: f64 = rng.sample(StandardNormal);
            proposal[k] = current[k] + global * scales[k] * eps;
        }
        let lp_new = log_density(&proposal);
        let a: f64 = rng.random();
        let burning = i < cfg.n_burn;
        if accept(lp_new - lp, a) {
            current.copy_from_slice(&proposal);
            lp = lp_new;
            rejected_run = 0;
            window_accepts += 1;
            if burning {
                burn_accepts += 1;
            } else {
                post_accepts += 1;
            }
        } else {
            rejected_run += 1;
            if rejected_run >= cfg.stuck_limit() {
                let done = (burn_accepts + post_accepts) as f64 / (i + 1) as f64;
                return Err(Error::StuckChain {
                    iteration: i,
                    rejected: rejected_run,
                    acceptance: done,
                });
            }
        }

        if burning && cfg.adapt {
            history.push(current.clone());
            if (i + 1) % ADAPT_WINDOW == 0 {
                let rate = window_accepts as f64 / ADAPT_WINDOW as f64;
                let (lo, hi) = TARGET_ACCEPTANCE;
                if rate < lo || rate > hi {
                    global *= (2.0 * (rate - 0.5 * (lo + hi))).exp();
                }
                window_accepts = 0;
                // reshape the diagonal from the spread of the recent burn-in,
                // leaving at least two windows to retune the global factor
                let windows_left = (cfg.n_burn - (i + 1)) / ADAPT_WINDOW;
                if (i + 1) % (5 * ADAPT_WINDOW) == 0
                    && history.len() >= 5 * ADAPT_WINDOW
                    && windows_left >= 2
                {
                    let recent = &history[history.len() / 2..];
                    let new: Vec<f64> = (0..d)
                        .map(|k| {
                            let col: Vec<f64> = recent.iter().map(|s| s[k]).collect();
                            2.38 / (d as f64).sqrt() * std_dev(&col)
                        })
                        .collect();
                    if new.iter().all(|s| *s > 0.0 && s.is_finite()) {
                        scales = new;
                        global = 1.0;
                    }
                }
            }
        } else if burning {
            window_accepts = 0;
        }
    }

    let post_iters = (cfg.n_total - 1).saturating_sub(cfg.n_burn).max(1);
    Ok(RawChain {
        samples,
        log_density: kept_lp,
        acceptance_rate: post_accepts as f64 / post_iters as f64,
        burn_in_acceptance: if cfg.n_burn > 0 {
            burn_accepts as f64 / cfg.n_burn as f64
        } else {
            f64::NAN
        },
        scales: scales.iter().map(|s| s * global).collect(),
    })
}

/// Unnormalized log posterior: log marginal likelihood plus log prior.
/// Returns `-∞` outside the prior support.
pub fn log_posterior(
    theta: &Theta,
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    priors: &PriorSpec,
) -> Result<f64> {
    let lp = priors.log_density(theta);
    if lp == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let model = assemble(datasets, bcs, theta)?;
    Ok(log_marginal_likelihood(&model, model.targets().as_slice())? + lp)
}

/// Retained posterior draws with sampler diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    pub names: Vec<String>,
    pub draws: Vec<Theta>,
    pub log_posterior: Vec<f64>,
    pub acceptance_rate: f64,
    pub burn_in_acceptance: f64,
    pub scales: Vec<f64>,
    pub seed: u64,
}

impl PosteriorChain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Draws of one parameter by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let layout = ParamLayout::for_theta(self.draws.first()?);
        let idx = layout.names.iter().position(|n| n == name)?;
        Some(self.draws.iter().map(|t| layout.values(t)[idx]).collect())
    }
}

/// Default proposal scales in sampling coordinates.
pub fn default_scales(layout: &ParamLayout, theta0: &Theta, priors: &PriorSpec) -> Vec<f64> {
    let values = layout.values(theta0);
    layout
        .transforms
        .iter()
        .enumerate()
        .map(|(k, t)| match t {
            Transform::Log => 0.1,
            Transform::Linear => {
                let prior = if k == 2 { priors.ei } else { priors.kga };
                match prior {
                    Prior::UniformBounded { lo, hi } => 0.05 * (hi - lo),
                    Prior::Flat => 0.05 * values[k].abs(),
                }
            }
        })
        .collect()
}

/// Starting point: prior midpoints for bounded stiffnesses, `ℓ = L/4`,
/// `σ_s²` from the deflection data spread, and each dataset's initial noise.
pub fn default_theta0(datasets: &[Dataset], priors: &PriorSpec, length: f64) -> Result<Theta> {
    let ei = priors
        .ei
        .midpoint()
        .ok_or_else(|| Error::Argument("EI prior is unbounded; supply an initial value".into()))?;
    let kga = priors
        .kga
        .midpoint()
        .ok_or_else(|| Error::Argument("kGA prior is unbounded; supply an initial value".into()))?;
    let w: Vec<f64> = datasets
        .iter()
        .filter(|d| d.kind == QuantityKind::Deflection)
        .flat_map(|d| d.y.iter().copied())
        .collect();
    let var = if w.len() >= 2 {
        let m = w.iter().sum::<f64>() / w.len() as f64;
        w.iter().map(|v| (v - m).powi(2)).sum::<f64>() / w.len() as f64
    } else {
        0.0
    };
    let sigma_s2 = if var > 0.0 { var } else { 1.0 };
    let mut theta = Theta::new(sigma_s2, 0.25 * length, ei, kga);
    for d in datasets {
        if let NoiseModel::Learn(s) = d.noise {
            theta.sigma_n.insert(d.label.clone(), s);
        }
    }
    Ok(theta)
}

pub fn run_chain(
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    priors: &PriorSpec,
    cfg: &McmcConfig,
    theta0: &Theta,
) -> Result<PosteriorChain> {
    cfg.validate()?;
    theta0.validate()?;
    if priors.log_density(theta0) == f64::NEG_INFINITY {
        return Err(Error::Argument(
            "initial theta lies outside the prior support".into(),
        ));
    }
    let layout = ParamLayout::for_theta(theta0);
    let scales = match &cfg.proposal_scale {
        Some(s) => s.clone(),
        None => default_scales(&layout, theta0, priors),
    };
    let target = |u: &[f64]| {
        let theta = layout.from_unconstrained(u);
        match log_posterior(&theta, datasets, bcs, priors) {
            Ok(lp) if lp.is_finite() => lp + layout.log_jacobian(u),
            _ => f64::NEG_INFINITY,
        }
    };
    let raw = sample(target, &layout.to_unconstrained(theta0), &scales, cfg)?;
    let draws: Vec<Theta> = raw
        .samples
        .iter()
        .map(|u| layout.from_unconstrained(u))
        .collect();
    let log_post = draws
        .iter()
        .zip(&raw.samples)
        .zip(&raw.log_density)
        .map(|((_, u), lp)| lp - layout.log_jacobian(u))
        .collect();
    Ok(PosteriorChain {
        names: layout.names.clone(),
        draws,
        log_posterior: log_post,
        acceptance_rate: raw.acceptance_rate,
        burn_in_acceptance: raw.burn_in_acceptance,
        scales: raw.scales,
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub mean: f64,
    pub std: f64,
    pub q025: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q975: f64,
    pub ess: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    if var == 0.0 {
        return 0.0;
    }
    let cov: f64 = (0..n - lag)
        .map(|i| (xs[i] - mean) * (xs[i + lag] - mean))
        .sum();
    cov / var
}

/// Effective sample size with Geyer's initial positive sequence.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return n as f64;
    }
    let mut tau = 1.0;
    let mut lag = 1;
    while lag + 1 < n {
        let pair = autocorrelation(xs, lag) + autocorrelation(xs, lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    n as f64 / tau
}

pub fn summarize_values(values: &[f64]) -> Result<ParamSummary> {
    if values.is_empty() {
        return Err(Error::Argument("cannot summarize an empty chain".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ParamSummary {
        mean,
        std,
        q025: quantile(&sorted, 0.025),
        q25: quantile(&sorted, 0.25),
        q50: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        q975: quantile(&sorted, 0.975),
        ess: effective_sample_size(values),
    })
}

pub fn summarize(chain: &PosteriorChain) -> Result<BTreeMap<String, ParamSummary>> {
    let first = chain
        .draws
        .first()
        .ok_or_else(|| Error::Argument("cannot summarize an empty chain".into()))?;
    let layout = ParamLayout::for_theta(first);
    let rows: Vec<Vec<f64>> = chain.draws.iter().map(|t| layout.values(t)).collect();
    layout
        .names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            Ok((name.clone(), summarize_values(&col)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors() {
        let u = Prior::uniform(0.5, 1.5).unwrap();
        assert_eq!(u.log_density(1.0), 0.0);
        assert_eq!(u.log_density(1.6), f64::NEG_INFINITY);
        assert_eq!(u.log_density(0.49), f64::NEG_INFINITY);
        assert!(Prior::uniform(2.0, 1.0).is_err());
        assert_eq!(Prior::Flat.log_density(3.0), 0.0);
        assert_eq!(Prior::Flat.log_density(-3.0), f64::NEG_INFINITY);
    }

    #[test]
    fn config_validation() {
        let mut cfg = McmcConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.n_burn = cfg.n_total;
        assert!(cfg.validate().is_err());
        let cfg = McmcConfig {
            n_thin: 0,
            ..McmcConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn accept_rule() {
        assert!(accept(0.0, 0.999));
        assert!(accept(2.0, 0.5));
        assert!(!accept(f64::NEG_INFINITY, 0.0));
        assert!(!accept(f64::NAN, 0.0));
        assert!(accept((0.25f64).ln(), 0.2499));
        assert!(!accept((0.25f64).ln(), 0.2501));
    }

    #[test]
    fn summary_of_simple_chains() {
        let s = summarize_values(&[2.0; 10]).unwrap();
        assert_eq!(s.std, 0.0);
        assert_eq!(s.mean, 2.0);
        let s = summarize_values(&[1.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert_eq!(s.q50, 2.0);
        assert!(summarize_values(&[]).is_err());
    }

    #[test]
    fn thinning_keeps_expected_indices() {
        // log density ignored by a zero-scale proposal: every state equals x0,
        // so count the retained states only
        let cfg = McmcConfig {
            n_total: 101,
            n_burn: 20,
            n_thin: 10,
            proposal_scale: None,
            seed: 1,
            adapt: false,
        };
        let chain = sample(|_| 0.0, &[0.0], &[0.0], &cfg).unwrap();
        // states 20, 30, ..., 100
        assert_eq!(chain.samples.len(), 9);
    }

    #[test]
    fn layout_round_trip() {
        let theta = Theta::new(2.0, 0.3, 1.1, 2.9)
            .with_noise("w", 0.01)
            .with_noise("phi", 0.02);
        let layout = ParamLayout::for_theta(&theta);
        assert_eq!(
            layout.names,
            vec!["sigma_s2", "ell", "EI", "kGA", "sigma_n:phi", "sigma_n:w"]
        );
        let u = layout.to_unconstrained(&theta);
        let back = layout.from_unconstrained(&u);
        assert!((back.sigma_s2 - 2.0).abs() < 1e-14);
        assert_eq!(back.ei, 1.1);
        assert!((back.sigma_n["w"] - 0.01).abs() < 1e-16);
    }

    #[test]
    fn stuck_chain_is_reported() {
        let cfg = McmcConfig {
            n_total: 5000,
            n_burn: 10,
            n_thin: 1,
            proposal_scale: None,
            seed: 3,
            adapt: false,
        };
        // only the starting point has finite density
        let r = sample(
            |x| if x[0] == 0.0 { 0.0 } else { f64::NEG_INFINITY },
            &[0.0],
            &[1.0],
            &cfg,
        );
        assert!(matches!(r, Err(Error::StuckChain { .. })));
    }
}
