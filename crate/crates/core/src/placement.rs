//! Greedy sensor placement on a candidate grid.
//!
//! Three criteria are supported. The physics-informed criterion scores a
//! candidate by its conditional entropy under the beam GP, conditioned on the
//! sensors placed so far and on the boundary conditions. The two baselines use
//! the plain SE kernel, ignore the quantity measured at a candidate and know
//! nothing about supports: `Entropy` maximizes the conditional entropy and
//! `MutualInformation` maximizes `H(x|S) - H(x|D \ (S ∪ {x}))`.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{factorize, BoundaryCondition, Observation, JITTER_LADDER};
use crate::kernels::{kernel, prior_variance, se_base, KernelParams, QuantityKind};

/// Flag that lifts the enumeration guard in the CLI.
pub const FULL_SCALE_FLAG: &str = "--full-scale";

/// Scores within this relative distance of the best are ties, resolved by
/// the lowest candidate index.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[serde(alias = "pi")]
    PhysicsInformedEntropy,
    Entropy,
    #[serde(alias = "mi")]
    MutualInformation,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [
        Criterion::PhysicsInformedEntropy,
        Criterion::Entropy,
        Criterion::MutualInformation,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Criterion::PhysicsInformedEntropy => "pi",
            Criterion::Entropy => "entropy",
            Criterion::MutualInformation => "mi",
        }
    }

    fn physics_informed(self) -> bool {
        self == Criterion::PhysicsInformedEntropy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub x: f64,
    pub kind: QuantityKind,
    #[serde(default)]
    pub z: f64,
}

impl Candidate {
    fn site(&self) -> Observation {
        Observation {
            kind: self.kind,
            x: self.x,
            z: self.z,
            noise_sd: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementProblem {
    pub candidates: Vec<Candidate>,
    pub n_sensors: usize,
    pub bcs: Vec<BoundaryCondition>,
    pub params: KernelParams,
    pub criterion: Criterion,
}

impl PlacementProblem {
    /// `n_points` equidistant candidates of one quantity over `[0, length]`.
    pub fn grid(
        length: f64,
        n_points: usize,
        kind: QuantityKind,
        n_sensors: usize,
        bcs: Vec<BoundaryCondition>,
        params: KernelParams,
        criterion: Criterion,
    ) -> Self {
        let candidates = (0..n_points)
            .map(|i| Candidate {
                x: if n_points > 1 {
                    length * i as f64 / (n_points - 1) as f64
                } else {
                    0.5 * length
                },
                kind,
                z: 0.0,
            })
            .collect();
        PlacementProblem {
            candidates,
            n_sensors,
            bcs,
            params,
            criterion,
        }
    }

    pub fn with_criterion(&self, criterion: Criterion) -> Self {
        PlacementProblem {
            criterion,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_sensors > self.candidates.len() {
            return Err(Error::Argument(format!(
                "{} sensors requested but only {} candidates",
                self.n_sensors,
                self.candidates.len()
            )));
        }
        if self.candidates.iter().any(|c| !c.x.is_finite()) {
            return Err(Error::Argument("candidate locations must be finite".into()));
        }
        Ok(())
    }

    fn covariance(&self, a: &Observation, b: &Observation) -> f64 {
        if self.criterion.physics_informed() {
            kernel(a.kind, b.kind, a.x, b.x, &self.params.with_depths(a.z, b.z))
        } else {
            se_base(a.x, b.x, &self.params)
        }
    }

    fn prior_var(&self, a: &Observation) -> f64 {
        if self.criterion.physics_informed() {
            prior_variance(a.kind, a.z, &self.params)
        } else {
            self.params.sigma_s2
        }
    }

    /// Variance floor of a candidate: the smallest jitter of the GP module.
    fn floor(&self, a: &Observation) -> f64 {
        let v = self.prior_var(a);
        JITTER_LADDER[0] * if v > 0.0 { v } else { self.params.sigma_s2 }
    }

    fn bc_sites(&self) -> Vec<Observation> {
        if !self.criterion.physics_informed() {
            return Vec::new();
        }
        self.bcs
            .iter()
            .flat_map(|bc| {
                bc.x.iter().map(move |&x| Observation {
                    kind: bc.kind,
                    x,
                    z: 0.0,
                    noise_sd: 0.0,
                })
            })
            .collect()
    }

    /// Conditional variances of `targets` given noise-free observations at
    /// `given` (plus jitter).
    fn conditional_variances(
        &self,
        given: &[Observation],
        targets: &[Observation],
    ) -> Result<Vec<f64>> {
        let prior: Vec<f64> = targets.iter().map(|t| self.covariance(t, t)).collect();
        if given.is_empty() {
            return Ok(prior);
        }
        let n = given.len();
        let k = DMatrix::from_fn(n, n, |i, j| self.covariance(&given[i], &given[j]));
        let units: Vec<f64> = given
            .iter()
            .map(|g| {
                let v = self.prior_var(g);
                if v > 0.0 {
                    v
                } else {
                    self.params.sigma_s2
                }
            })
            .collect();
        let (chol, _) = factorize(&k, &units)?;
        let ks = DMatrix::from_fn(n, targets.len(), |i, j| {
            self.covariance(&given[i], &targets[j])
        });
        let v = chol
            .l_dirty()
            .lower_triangle()
            .solve_lower_triangular(&ks)
            .expect("positive Cholesky diagonal");
        Ok(prior
            .iter()
            .enumerate()
            .map(|(j, p)| p - v.column(j).norm_squared())
            .collect())
    }

    /// Candidate covariance conditioned on the boundary conditions.
    fn conditioned_covariance(&self) -> Result<DMatrix<f64>> {
        let sites: Vec<Observation> = self.candidates.iter().map(Candidate::site).collect();
        let n = sites.len();
        let mut cov = DMatrix::from_fn(n, n, |i, j| self.covariance(&sites[i], &sites[j]));
        let bc = self.bc_sites();
        if !bc.is_empty() {
            let m = bc.len();
            let kbb = DMatrix::from_fn(m, m, |i, j| self.covariance(&bc[i], &bc[j]));
            let units: Vec<f64> = bc.iter().map(|b| self.prior_var(b)).collect();
            let (chol, _) = factorize(&kbb, &units)?;
            let kbd = DMatrix::from_fn(m, n, |i, j| self.covariance(&bc[i], &sites[j]));
            let v = chol
                .l_dirty()
                .lower_triangle()
                .solve_lower_triangular(&kbd)
                .expect("positive Cholesky diagonal");
            cov -= v.transpose() * v;
        }
        Ok(cov)
    }
}

fn gaussian_entropy(var: f64) -> f64 {
    0.5 * (2.0 * PI * E * var).ln()
}

/// `½ ln(2πe σ²)` of a quantity at `x_star` given noise-free sensors at
/// `placed` and the boundary conditions, under the physics-informed model.
pub fn conditional_entropy(
    x_star: f64,
    kind: QuantityKind,
    placed: &[Candidate],
    bcs: &[BoundaryCondition],
    params: &KernelParams,
) -> Result<f64> {
    let problem = PlacementProblem {
        candidates: Vec::new(),
        n_sensors: 0,
        bcs: bcs.to_vec(),
        params: *params,
        criterion: Criterion::PhysicsInformedEntropy,
    };
    let target = Candidate {
        x: x_star,
        kind,
        z: 0.0,
    }
    .site();
    let mut given = problem.bc_sites();
    given.extend(placed.iter().map(Candidate::site));
    let var = problem.conditional_variances(&given, &[target])?[0];
    Ok(gaussian_entropy(var.max(problem.floor(&target))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub criterion: Criterion,
    /// Candidate indices in selection order.
    pub indices: Vec<usize>,
    pub selected: Vec<Candidate>,
    /// Criterion value of each selected candidate at the step it was chosen.
    pub gains: Vec<f64>,
    /// Joint entropy of the selection under the problem's own model.
    pub set_entropy: f64,
}

fn argmax_lowest(scores: &[(usize, f64)]) -> (usize, f64) {
    let max = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let cut = max - TIE_TOLERANCE * max.abs().max(1.0);
    scores
        .iter()
        .filter(|s| s.1 >= cut)
        .min_by_key(|s| s.0)
        .copied()
        .expect("at least one open candidate")
}

pub fn greedy_place(problem: &PlacementProblem) -> Result<PlacementResult> {
    problem.validate()?;
    let sites: Vec<Observation> = problem.candidates.iter().map(Candidate::site).collect();
    let bc = problem.bc_sites();
    let mut chosen: Vec<usize> = Vec::with_capacity(problem.n_sensors);
    let mut gains = Vec::with_capacity(problem.n_sensors);

    for _ in 0..problem.n_sensors {
        let open: Vec<usize> = (0..sites.len()).filter(|i| !chosen.contains(i)).collect();
        let mut given = bc.clone();
        given.extend(chosen.iter().map(|&i| sites[i]));
        let targets: Vec<Observation> = open.iter().map(|&i| sites[i]).collect();
        let var_s = problem.conditional_variances(&given, &targets)?;

        let scores: Vec<(usize, f64)> = match problem.criterion {
            Criterion::PhysicsInformedEntropy | Criterion::Entropy => open
                .iter()
                .zip(&var_s)
                .map(|(&i, &v)| (i, gaussian_entropy(v.max(problem.floor(&sites[i])))))
                .collect(),
            Criterion::MutualInformation => open
                .par_iter()
                .zip(var_s.par_iter())
                .map(|(&i, &v)| {
                    let rest: Vec<Observation> = open
                        .iter()
                        .filter(|&&j| j != i)
                        .map(|&j| sites[j])
                        .collect();
                    let v_rest = problem.conditional_variances(&rest, &[sites[i]])?[0];
                    let floor = problem.floor(&sites[i]);
                    Ok((i, 0.5 * (v.max(floor) / v_rest.max(floor)).ln()))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let (pick, score) = argmax_lowest(&scores);
        chosen.push(pick);
        gains.push(score);
    }

    let set_entropy = if chosen.is_empty() {
        0.0
    } else {
        set_entropy(&chosen, problem)?
    };
    Ok(PlacementResult {
        criterion: problem.criterion,
        selected: chosen.iter().map(|&i| problem.candidates[i]).collect(),
        indices: chosen,
        gains,
        set_entropy,
    })
}

/// Log-determinant of a covariance by sequential conditioning, with every
/// conditional variance floored.
fn floored_joint_entropy(cov: &DMatrix<f64>, subset: &[usize], floors: &[f64]) -> f64 {
    let n = subset.len();
    let mut l = vec![0.0; n * n];
    let mut h = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = cov[(subset[i], subset[j])];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                let d = s.max(floors[subset[i]]);
                h += gaussian_entropy(d);
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    h
}

fn check_subset(subset: &[usize], n: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Argument("empty sensor selection".into()));
    }
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::Argument(format!("candidate index {i} out of range")));
        }
        if seen[i] {
            return Err(Error::Argument(format!("candidate {i} selected twice")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn floors(problem: &PlacementProblem) -> Vec<f64> {
    problem
        .candidates
        .iter()
        .map(|c| problem.floor(&c.site()))
        .collect()
}

/// Joint Gaussian entropy of the selected candidates under the problem's
/// prior model (conditioned on the boundary conditions when physics-informed).
pub fn set_entropy(selected: &[usize], problem: &PlacementProblem) -> Result<f64> {
    check_subset(selected, problem.candidates.len())?;
    let cov = problem.conditioned_covariance()?;
    Ok(floored_joint_entropy(&cov, selected, &floors(problem)))
}

/// Number of `k`-subsets of `n` items.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for remaining in (1..=k).rev() {
        loop {
            let count = binomial(n - next - 1, remaining - 1);
            if rank < count {
                out.push(next);
                next += 1;
                break;
            }
            rank -= count;
            next += 1;
        }
    }
    out
}

/// Entropies of a population of subsets with min-max normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyMap {
    pub subsets: Vec<Vec<usize>>,
    pub entropy: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// True when every subset was enumerated.
    pub exhaustive: bool,
}

impl EntropyMap {
    fn from_parts(subsets: Vec<Vec<usize>>, entropy: Vec<f64>, exhaustive: bool) -> Self {
        let min = entropy.iter().copied().fold(f64::INFINITY, f64::min);
        let max = entropy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        EntropyMap {
            subsets,
            entropy,
            min,
            max,
            exhaustive,
        }
    }

    /// Position of an entropy value within the population range.
    pub fn normalize(&self, h: f64) -> f64 {
        if self.max > self.min {
            (h - self.min) / (self.max - self.min)
        } else {
            1.0
        }
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.entropy.iter().map(|&h| self.normalize(h)).collect()
    }

    pub fn best(&self) -> Option<(&[usize], f64)> {
        let i =
            (0..self.entropy.len()).max_by(|&a, &b| self.entropy[a].total_cmp(&self.entropy[b]))?;
        Some((&self.subsets[i], self.entropy[i]))
    }
}

/// Enumerates every `n_sensors`-subset of the candidates and scores it with
/// the problem's set entropy. Refuses when the count exceeds `max_combos`.
pub fn exhaustive_entropy_map(problem: &PlacementProblem, max_combos: u128) -> Result<EntropyMap> {
    problem.validate()?;
    let n = problem.candidates.len();
    let k = problem.n_sensors;
    if k == 0 {
        return Err(Error::Argument(
            "entropy map needs at least one sensor".into(),
        ));
    }
    let total = binomial(n, k);
    if total > max_combos {
        return Err(Error::EnumerationGuard {
            required: total,
            limit: max_combos,
            flag: FULL_SCALE_FLAG,
        });
    }
    let cov = problem.conditioned_covariance()?;
    let fl = floors(problem);
    let (subsets, entropy): (Vec<Vec<usize>>, Vec<f64>) = (0..total as u64)
        .into_par_iter()
        .map(|r| {
            let s = unrank(r as u128, n, k);
            let h = floored_joint_entropy(&cov, &s, &fl);
            (s, h)
        })
        .unzip();
    Ok(EntropyMap::from_parts(subsets, entropy, true))
}

/// Scores `n_samples` uniformly drawn subsets; used for normalization when
/// full enumeration is guarded.
pub fn sampled_entropy_map(
    problem: &PlacementProblem,
    n_samples: usize,
    seed: u64,
) -> Result<EntropyMap> {
    problem.validate()?;
    let n = problem.candidates.len();
    let k = problem.n_sensors;
    if k == 0 {
        return Err(Error::Argument(
            "entropy map needs at least one sensor".into(),
        ));
    }
    let cov = problem.conditioned_covariance()?;
    let fl = floors(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> = (0..n_samples)
        .map(|_| {
            let mut s = sample_indices(&mut rng, n, k).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let entropy = subsets
        .par_iter()
        .map(|s| floored_joint_entropy(&cov, s, &fl))
        .collect();
    Ok(EntropyMap::from_parts(subsets, entropy, false))
}
