//! The five subcommands. Each returns the manifest of the files it wrote.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use timo_pigp::beam::{synthesize_dataset, BeamConfig, NoiseLevel, NoiseSpec};
use timo_pigp::gp::{
    assemble, predict_mixture, BoundaryCondition, Dataset, ModelDiagnostics, NoiseModel, Theta,
};
use timo_pigp::io::{read_chain, read_datasets, write_datasets, write_predictions};
use timo_pigp::kernels::KernelParams;
use timo_pigp::mcmc::{
    default_theta0, run_chain, summarize, ParamSummary, PosteriorChain, Prior, PriorSpec,
};
use timo_pigp::placement::{
    exhaustive_entropy_map, greedy_place, sampled_entropy_map, set_entropy, Candidate, Criterion,
    EntropyMap, PlacementProblem, PlacementResult,
};
use timo_pigp::{QuantityKind, Result as CoreResult};

use crate::config::{Budget, DatasetSpec, ExperimentConfig, Locations, MapMode, PlacementSection};
use crate::error::{CliError, Result};
use crate::manifest::{Manifest, OutputDir};
use crate::seeds::{derive, Stream};
use crate::study;

/// Relative noise of an informed load set.
pub const INFORMED_LOAD_NOISE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Overrides the config's root seed.
    pub seed: Option<u64>,
    pub full_scale: bool,
    /// Dump the training covariance at the starting point as CSV.
    pub dump_kernel: bool,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions {
            out: out.into(),
            seed: None,
            full_scale: false,
            dump_kernel: false,
        }
    }
}

/// Resolved pieces shared by all commands.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub beam: BeamConfig,
    pub root_seed: u64,
    pub full_scale: bool,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig, opts: &RunOptions) -> Result<Self> {
        Ok(Context {
            cfg,
            beam: cfg.beam.resolve()?,
            root_seed: opts.seed.unwrap_or(cfg.seed),
            full_scale: opts.full_scale,
        })
    }

    fn output(&self, opts: &RunOptions, command: &str) -> Result<OutputDir> {
        OutputDir::open(&opts.out, command, self.root_seed, &self.cfg.hash())
    }
}

// ---------------------------------------------------------------- placement

pub fn placement_params(section: &PlacementSection, beam: &BeamConfig) -> KernelParams {
    KernelParams::new(
        section.sigma_s2,
        section.ell.unwrap_or(beam.length / 8.0),
        beam.ei,
        beam.kga,
    )
}

/// One placement problem per domain, or a single joint one.
pub fn placement_problems(
    section: &PlacementSection,
    beam: &BeamConfig,
    bcs: &[BoundaryCondition],
    criterion: Criterion,
) -> Vec<(String, PlacementProblem)> {
    let params = placement_params(section, beam);
    let grid = |kind| {
        PlacementProblem::grid(
            beam.length,
            section.n_points,
            kind,
            section.n_sensors,
            bcs.to_vec(),
            params,
            criterion,
        )
    };
    match section.budget {
        Budget::PerDomain => section
            .domains
            .iter()
            .map(|&k| (k.symbol().to_string(), grid(k)))
            .collect(),
        Budget::Joint => {
            let mut joint = grid(section.domains[0]);
            joint.candidates = section
                .domains
                .iter()
                .flat_map(|&k| grid(k).candidates)
                .collect::<Vec<Candidate>>();
            vec![("joint".to_string(), joint)]
        }
    }
}

/// Greedy placements keyed by `(criterion, domain label)`, computed on demand.
#[derive(Default)]
pub struct PlacementCache {
    results: BTreeMap<(String, String), PlacementResult>,
}

impl PlacementCache {
    pub fn get(
        &mut self,
        section: &PlacementSection,
        beam: &BeamConfig,
        bcs: &[BoundaryCondition],
        criterion: Criterion,
        domain: QuantityKind,
    ) -> Result<&PlacementResult> {
        let label = match section.budget {
            Budget::PerDomain => domain.symbol().to_string(),
            Budget::Joint => "joint".to_string(),
        };
        let key = (criterion.short_name().to_string(), label.clone());
        if !self.results.contains_key(&key) {
            let (_, problem) = placement_problems(section, beam, bcs, criterion)
                .into_iter()
                .find(|(l, _)| *l == label)
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "domain {domain} is not among the placement domains"
                    ))
                })?;
            self.results.insert(key.clone(), greedy_place(&problem)?);
        }
        Ok(&self.results[&key])
    }

    /// Sensor locations of `domain`, ascending.
    pub fn locations(
        &mut self,
        section: &PlacementSection,
        beam: &BeamConfig,
        bcs: &[BoundaryCondition],
        criterion: Criterion,
        domain: QuantityKind,
    ) -> Result<Vec<f64>> {
        let r = self.get(section, beam, bcs, criterion, domain)?;
        let mut xs: Vec<f64> = r
            .selected
            .iter()
            .filter(|c| c.kind == domain)
            .map(|c| c.x)
            .collect();
        xs.sort_by(f64::total_cmp);
        Ok(xs)
    }
}

#[derive(Debug, Serialize)]
struct SensorOut {
    x: f64,
    kind: QuantityKind,
}

#[derive(Debug, Serialize)]
struct PlacementOut {
    criterion: Criterion,
    domain: String,
    indices: Vec<usize>,
    sensors: Vec<SensorOut>,
    /// Criterion value at each greedy step.
    gains: Vec<f64>,
    set_entropy: f64,
    /// Joint entropy of the set under the physics-informed model.
    pi_set_entropy: Option<f64>,
    /// `pi_set_entropy` normalized by the entropy map of the domain.
    normalized_pi_entropy: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PlacementReport {
    params: KernelParams,
    n_points: usize,
    n_sensors: usize,
    budget: Budget,
    results: Vec<PlacementOut>,
}

fn map_csv(map: &EntropyMap) -> String {
    let mut s = String::from("subset,entropy,normalized\n");
    for (subset, h) in map.subsets.iter().zip(&map.entropy) {
        let ids: Vec<String> = subset.iter().map(|i| i.to_string()).collect();
        s.push_str(&format!("{},{},{}\n", ids.join(" "), h, map.normalize(*h)));
    }
    s
}

pub fn cmd_place(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Manifest> {
    let ctx = Context::new(cfg, opts)?;
    let section = cfg
        .placement
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no placement section".into()))?;
    let bcs = cfg.bcs.resolve(&ctx.beam);
    let mut out = ctx.output(opts, "place")?;

    // entropy maps are taken under the physics-informed model
    let pi_problems =
        placement_problems(section, &ctx.beam, &bcs, Criterion::PhysicsInformedEntropy);
    let mut maps: BTreeMap<String, EntropyMap> = BTreeMap::new();
    if section.n_sensors > 0 {
        for (d, (label, problem)) in pi_problems.iter().enumerate() {
            let map = match section.entropy_map {
                MapMode::None => continue,
                MapMode::Exhaustive => {
                    let limit = if ctx.full_scale {
                        u128::MAX
                    } else {
                        section.max_combos as u128
                    };
                    exhaustive_entropy_map(problem, limit)?
                }
                MapMode::Sampled => {
                    let seed = derive(ctx.root_seed, Stream::Map, &[d as u64]);
                    let map = sampled_entropy_map(problem, section.map_samples, seed)?;
                    out.write(
                        &format!("entropy_map_{label}.csv"),
                        map_csv(&map).as_bytes(),
                        Some(seed),
                    )?;
                    maps.insert(label.clone(), map);
                    continue;
                }
            };
            out.write(
                &format!("entropy_map_{label}.csv"),
                map_csv(&map).as_bytes(),
                None,
            )?;
            maps.insert(label.clone(), map);
        }
    }

    let mut results = Vec::new();
    for &criterion in &section.criteria {
        for (label, problem) in placement_problems(section, &ctx.beam, &bcs, criterion) {
            let r = greedy_place(&problem)?;
            let pi_problem = &pi_problems
                .iter()
                .find(|(l, _)| *l == label)
                .expect("same domains")
                .1;
            let pi_h = if r.indices.is_empty() {
                None
            } else {
                Some(set_entropy(&r.indices, pi_problem)?)
            };
            results.push(PlacementOut {
                criterion,
                normalized_pi_entropy: pi_h.and_then(|h| maps.get(&label).map(|m| m.normalize(h))),
                domain: label,
                sensors: r
                    .selected
                    .iter()
                    .map(|c| SensorOut {
                        x: c.x,
                        kind: c.kind,
                    })
                    .collect(),
                indices: r.indices,
                gains: r.gains,
                set_entropy: r.set_entropy,
                pi_set_entropy: pi_h,
            });
        }
    }
    let report = PlacementReport {
        params: placement_params(section, &ctx.beam),
        n_points: section.n_points,
        n_sensors: section.n_sensors,
        budget: section.budget,
        results,
    };
    out.write_json("placement.json", &report, None)?;
    out.finish()
}

// --------------------------------------------------------------- simulation

/// Locations of a dataset before repetition.
pub fn base_locations(
    spec: &DatasetSpec,
    cfg: &ExperimentConfig,
    beam: &BeamConfig,
    bcs: &[BoundaryCondition],
    cache: &mut PlacementCache,
) -> Result<Vec<f64>> {
    match &spec.locations {
        Locations::Explicit(xs) => Ok(xs.clone()),
        Locations::Grid { grid } => Ok(beam.grid(*grid)),
        Locations::Placement { placement } => {
            let section = cfg.placement.as_ref().expect("validated");
            cache.locations(section, beam, bcs, placement.criterion, placement.domain)
        }
    }
}

/// Overrides applied by sweeps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub snr: Option<f64>,
    pub ndp: Option<usize>,
}

/// Synthesizes every configured dataset. `seed_of(i)` gives the noise seed
/// of dataset `i`; informed load sets carry no seed.
pub fn synthesize_all(
    cfg: &ExperimentConfig,
    beam: &BeamConfig,
    bcs: &[BoundaryCondition],
    cache: &mut PlacementCache,
    overrides: Overrides,
    seed_of: impl Fn(usize) -> u64,
) -> Result<Vec<(Dataset, Option<u64>)>> {
    let mut out = Vec::with_capacity(cfg.datasets.len());
    for (i, spec) in cfg.datasets.iter().enumerate() {
        let base = base_locations(spec, cfg, beam, bcs, cache)?;
        if base.is_empty() {
            return Err(CliError::Config(format!(
                "dataset `{}` has no locations",
                spec.id
            )));
        }
        if spec.informed {
            out.push((
                Dataset::informed_load(beam.q0, &base, spec.id.as_str())?,
                None,
            ));
            continue;
        }
        let ndp = overrides.ndp.unwrap_or(spec.ndp);
        let xs: Vec<f64> = base
            .iter()
            .flat_map(|&x| std::iter::repeat_n(x, ndp))
            .collect();
        let depths = match &spec.depths {
            None => None,
            Some(d) if d.len() == 1 => Some(vec![d[0]; xs.len()]),
            Some(d) if d.len() == base.len() => Some(
                d.iter()
                    .flat_map(|&z| std::iter::repeat_n(z, ndp))
                    .collect(),
            ),
            Some(d) => {
                return Err(CliError::Config(format!(
                    "dataset `{}`: {} depths for {} locations",
                    spec.id,
                    d.len(),
                    base.len()
                )))
            }
        };
        let level = match overrides.snr {
            Some(s) => NoiseLevel::Snr(s),
            None => spec.noise.expect("validated"),
        };
        let seed = seed_of(i);
        let noise = NoiseSpec { level, seed };
        let d = synthesize_dataset(beam, spec.kind, &xs, depths.as_deref(), &noise, &spec.id)?;
        out.push((d, Some(seed)));
    }
    Ok(out)
}

pub fn cmd_simulate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Manifest> {
    let ctx = Context::new(cfg, opts)?;
    if cfg.datasets.is_empty() {
        return Err(CliError::Config("config defines no datasets".into()));
    }
    let bcs = cfg.bcs.resolve(&ctx.beam);
    let mut cache = PlacementCache::default();
    let root = ctx.root_seed;
    let sets = synthesize_all(
        cfg,
        &ctx.beam,
        &bcs,
        &mut cache,
        Overrides::default(),
        |i| derive(root, Stream::Noise, &[0, 0, i as u64]),
    )?;
    let mut out = ctx.output(opts, "simulate")?;
    for (d, seed) in &sets {
        let mut buf = Vec::new();
        write_datasets(&mut buf, std::slice::from_ref(d))?;
        out.write(&format!("data_{}.csv", d.label), &buf, *seed)?;
    }
    out.finish()
}

// ----------------------------------------------------------- identification

/// Noise model of a loaded dataset from its config entry. An SNR level is
/// turned into a standard deviation with the peak of the data itself.
pub fn assign_noise(d: Dataset, spec: &DatasetSpec, beam: &BeamConfig) -> Result<Dataset> {
    if spec.kind != d.kind {
        return Err(CliError::Data(format!(
            "dataset `{}` holds {} values but the config declares {}",
            d.label, d.kind, spec.kind
        )));
    }
    if spec.informed {
        return Ok(d.with_noise(NoiseModel::Fixed(INFORMED_LOAD_NOISE * beam.q0.abs())));
    }
    let sigma = match spec.noise.expect("validated") {
        NoiseLevel::SigmaN(s) => s,
        NoiseLevel::Snr(s) => d.y.iter().fold(0.0f64, |m, y| m.max(y.abs())) / s,
    };
    let model = if spec.learn_noise && sigma > 0.0 {
        NoiseModel::Learn(sigma)
    } else {
        NoiseModel::Fixed(sigma)
    };
    Ok(d.with_noise(model))
}

pub fn read_data_files(paths: &[PathBuf]) -> Result<Vec<Dataset>> {
    let mut all: Vec<Dataset> = Vec::new();
    for p in paths {
        let f = std::fs::File::open(p)
            .map_err(|e| CliError::io(format!("cannot open {}", p.display()), e))?;
        let sets = read_datasets(f, NoiseModel::Fixed(0.0))
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        for d in sets {
            if all.iter().any(|a| a.label == d.label) {
                return Err(CliError::Data(format!(
                    "dataset `{}` appears in more than one file",
                    d.label
                )));
            }
            all.push(d);
        }
    }
    if all.is_empty() {
        return Err(CliError::Data("no data rows found".into()));
    }
    Ok(all)
}

pub fn configure_datasets(
    cfg: &ExperimentConfig,
    beam: &BeamConfig,
    data: Vec<Dataset>,
) -> Result<Vec<Dataset>> {
    data.into_iter()
        .map(|d| {
            let spec = cfg
                .datasets
                .iter()
                .find(|s| s.id == d.label)
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "dataset `{}` is not declared in the config",
                        d.label
                    ))
                })?;
            assign_noise(d, spec, beam)
        })
        .collect()
}

pub fn starting_point(
    cfg: &ExperimentConfig,
    datasets: &[Dataset],
    priors: &PriorSpec,
    beam: &BeamConfig,
) -> Result<Theta> {
    // an explicit start stands in for the prior midpoint
    let mut probe = priors.clone();
    if let Some(v) = cfg.mcmc.initial_ei {
        probe.ei = Prior::uniform(0.5 * v, 1.5 * v)?;
    }
    if let Some(v) = cfg.mcmc.initial_kga {
        probe.kga = Prior::uniform(0.5 * v, 1.5 * v)?;
    }
    Ok(default_theta0(datasets, &probe, beam.length)?)
}

pub fn identify(
    cfg: &ExperimentConfig,
    beam: &BeamConfig,
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    chain_seed: u64,
) -> Result<PosteriorChain> {
    let priors = cfg.priors.resolve(beam)?;
    let theta0 = starting_point(cfg, datasets, &priors, beam)?;
    let mc = cfg.mcmc.to_config(chain_seed)?;
    Ok(run_chain(datasets, bcs, &priors, &mc, &theta0)?)
}

#[derive(Debug, Serialize)]
struct Ratio {
    mean: f64,
    std: f64,
}

#[derive(Debug, Serialize)]
struct IdentifySummary {
    seed: u64,
    n_draws: usize,
    parameters: BTreeMap<String, ParamSummary>,
    /// Posterior of `EI / EI_true` and `kGA / kGA_true` for the configured beam.
    ei_ratio: Ratio,
    kga_ratio: Ratio,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct IdentifyDiagnostics {
    seed: u64,
    acceptance_rate: f64,
    burn_in_acceptance: f64,
    ess: BTreeMap<String, f64>,
    proposal_scales: Vec<f64>,
    /// Covariance model at the posterior mean.
    model_at_mean: ModelDiagnostics,
}

fn data_warnings(datasets: &[Dataset]) -> Vec<String> {
    let has = |k: QuantityKind| datasets.iter().any(|d| d.kind == k);
    let mut w = Vec::new();
    if has(QuantityKind::Deflection) && !has(QuantityKind::Rotation) && !has(QuantityKind::Strain) {
        w.push("deflection data alone identify EI and kGA only weakly; treat the stiffness posterior as unreliable".into());
    }
    if !datasets.iter().any(|d| d.kind != QuantityKind::Load) {
        w.push("no measured response data; the posterior reflects the priors".into());
    }
    w
}

fn kernel_csv(model: &timo_pigp::CovarianceModel) -> String {
    let k = model.covariance();
    let mut s = String::new();
    for i in 0..k.nrows() {
        let row: Vec<String> = (0..k.ncols()).map(|j| k[(i, j)].to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn cmd_identify(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    data: &[PathBuf],
) -> Result<Manifest> {
    let ctx = Context::new(cfg, opts)?;
    let bcs = cfg.bcs.resolve(&ctx.beam);
    let datasets = configure_datasets(cfg, &ctx.beam, read_data_files(data)?)?;
    let seed = derive(ctx.root_seed, Stream::Chain, &[0, 0]);
    let mut out = ctx.output(opts, "identify")?;

    if opts.dump_kernel {
        let priors = cfg.priors.resolve(&ctx.beam)?;
        let theta0 = starting_point(cfg, &datasets, &priors, &ctx.beam)?;
        let model = assemble(&datasets, &bcs, &theta0)?;
        out.write("kernel_theta0.csv", kernel_csv(&model).as_bytes(), None)?;
    }

    let chain = identify(cfg, &ctx.beam, &datasets, &bcs, seed)?;
    let mut buf = Vec::new();
    timo_pigp::io::write_chain(&mut buf, &chain)?;
    out.write("chain.csv", &buf, Some(seed))?;

    let parameters = summarize(&chain)?;
    let ratio = |name: &str, truth: f64| Ratio {
        mean: parameters[name].mean / truth,
        std: parameters[name].std / truth,
    };
    let summary = IdentifySummary {
        seed,
        n_draws: chain.len(),
        ei_ratio: ratio("EI", ctx.beam.ei),
        kga_ratio: ratio("kGA", ctx.beam.kga),
        warnings: data_warnings(&datasets),
        parameters: parameters.clone(),
    };
    out.write_json("summary.json", &summary, Some(seed))?;

    let mean_values: Vec<f64> = chain.names.iter().map(|n| parameters[n].mean).collect();
    let theta_mean = timo_pigp::io::theta_from_named(&chain.names, &mean_values)?;
    let diagnostics = IdentifyDiagnostics {
        seed,
        acceptance_rate: chain.acceptance_rate,
        burn_in_acceptance: chain.burn_in_acceptance,
        ess: parameters.iter().map(|(k, v)| (k.clone(), v.ess)).collect(),
        proposal_scales: chain.scales.clone(),
        model_at_mean: assemble(&datasets, &bcs, &theta_mean)?.diagnostics(),
    };
    out.write_json("diagnostics.json", &diagnostics, Some(seed))?;
    out.finish()
}

// --------------------------------------------------------------- prediction

/// At most `max` draws, evenly spaced along the chain.
pub fn thin_draws(draws: &[Theta], max: usize) -> Vec<Theta> {
    if draws.len() <= max {
        return draws.to_vec();
    }
    (0..max)
        .map(|i| draws[i * draws.len() / max].clone())
        .collect()
}

/// Query sites of one quantity: a line grid, or the `(x, z)` grid for strain.
pub fn query_grid(
    cfg: &ExperimentConfig,
    beam: &BeamConfig,
    kind: QuantityKind,
) -> (Vec<f64>, Option<Vec<f64>>) {
    if kind.needs_depth() {
        let g = cfg.predict.strain_grid;
        let xs = beam.grid(g.nx);
        let zs: Vec<f64> = (0..g.nz)
            .map(|j| beam.height * (j as f64 / (g.nz - 1) as f64 - 0.5))
            .collect();
        let (mut x, mut z) = (Vec::new(), Vec::new());
        for &xi in &xs {
            for &zj in &zs {
                x.push(xi);
                z.push(zj);
            }
        }
        (x, Some(z))
    } else {
        (beam.grid(cfg.predict.n_points), None)
    }
}

pub fn predict_all(
    cfg: &ExperimentConfig,
    beam: &BeamConfig,
    datasets: &[Dataset],
    bcs: &[BoundaryCondition],
    draws: &[Theta],
) -> CoreResult<Vec<timo_pigp::Prediction>> {
    let draws = thin_draws(draws, cfg.predict.max_draws);
    cfg.predict
        .quantities
        .iter()
        .map(|&kind| {
            let (x, z) = query_grid(cfg, beam, kind);
            predict_mixture(datasets, bcs, &draws, kind, &x, z.as_deref())
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct PredictDiagnostics {
    n_draws: usize,
    conditioning_warnings: BTreeMap<String, usize>,
}

pub fn cmd_predict(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    chain_path: &Path,
    data: &[PathBuf],
) -> Result<Manifest> {
    let ctx = Context::new(cfg, opts)?;
    let bcs = cfg.bcs.resolve(&ctx.beam);
    let datasets = configure_datasets(cfg, &ctx.beam, read_data_files(data)?)?;
    let f = std::fs::File::open(chain_path)
        .map_err(|e| CliError::io(format!("cannot open {}", chain_path.display()), e))?;
    let (_, draws) =
        read_chain(f).map_err(|e| CliError::Data(format!("{}: {e}", chain_path.display())))?;
    if draws.is_empty() {
        return Err(CliError::Data(format!(
            "{} holds no draws",
            chain_path.display()
        )));
    }
    let preds = predict_all(cfg, &ctx.beam, &datasets, &bcs, &draws)?;
    let mut out = ctx.output(opts, "predict")?;
    let mut warnings = BTreeMap::new();
    for p in &preds {
        let mut buf = Vec::new();
        write_predictions(&mut buf, std::slice::from_ref(p))?;
        out.write(&format!("pred_{}.csv", p.kind.symbol()), &buf, None)?;
        warnings.insert(p.kind.symbol().to_string(), p.conditioning_warnings);
    }
    let diag = PredictDiagnostics {
        n_draws: thin_draws(&draws, cfg.predict.max_draws).len(),
        conditioning_warnings: warnings,
    };
    out.write_json("predict_diagnostics.json", &diag, None)?;
    out.finish()
}

// -------------------------------------------------------------------- study

pub fn cmd_study(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Manifest> {
    let ctx = Context::new(cfg, opts)?;
    let outcome = study::run_study(&ctx)?;
    let mut out = ctx.output(opts, "study")?;
    out.write(
        "study_runs.csv",
        study::runs_csv(&outcome.runs).as_bytes(),
        Some(ctx.root_seed),
    )?;
    out.write(
        "study_sweep.csv",
        study::sweep_csv(&outcome.points).as_bytes(),
        Some(ctx.root_seed),
    )?;
    out.finish()
}
