//! Replicated identification sweeps over noise, rigidity or repeat count.
//!
//! Every `(point, replication)` pair is an independent work item with seeds
//! derived from the root seed, so results do not depend on scheduling. Items
//! run on the rayon pool and are collected in input order.

use rayon::prelude::*;
use serde::Serialize;
use timo_pigp::beam::BeamConfig;
use timo_pigp::mcmc::{quantile, summarize};

use crate::commands::{
    configure_datasets, identify, synthesize_all, Context, Overrides, PlacementCache,
};
use crate::config::{with_rigidity_of, StudyKind, StudySection, REPLICATION_GUARD};
use crate::error::{CliError, Result};
use crate::seeds::{derive, Stream};

/// Outcome of one identification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub point: usize,
    pub value: f64,
    pub replication: usize,
    pub with_bcs: bool,
    pub chain_seed: u64,
    /// `None` on success, otherwise the error message.
    pub error: Option<String>,
    /// Posterior mean and std of `EI / EI_true`.
    pub ei_mean: f64,
    pub ei_std: f64,
    pub kga_mean: f64,
    pub kga_std: f64,
    pub acceptance: f64,
}

/// Mean and central 95% interval across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    fn of(values: &[f64]) -> Band {
        if values.is_empty() {
            return Band {
                mean: f64::NAN,
                lo: f64::NAN,
                hi: f64::NAN,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Band {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            lo: quantile(&sorted, 0.025),
            hi: quantile(&sorted, 0.975),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub with_bcs: bool,
    pub n_ok: usize,
    pub n_failed: usize,
    /// Posterior means of the replications.
    pub ei_mean: Band,
    /// Posterior standard deviations of the replications.
    pub ei_std: Band,
    pub kga_mean: Band,
    pub kga_std: Band,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub runs: Vec<RunRecord>,
    pub points: Vec<SweepPoint>,
}

pub fn replications(section: &StudySection, full_scale: bool) -> Result<usize> {
    let n = if full_scale {
        section.full_scale_replications.max(section.replications)
    } else {
        section.replications
    };
    if n > REPLICATION_GUARD && !full_scale {
        return Err(CliError::Config(format!(
            "{n} replications exceed the guard of {REPLICATION_GUARD}; rerun with `--full-scale`"
        )));
    }
    Ok(n)
}

fn point_beam(ctx: &Context, kind: StudyKind, value: f64) -> Result<BeamConfig> {
    match kind {
        StudyKind::Rigidity => with_rigidity_of(&ctx.beam, value),
        _ => Ok(ctx.beam),
    }
}

fn overrides(kind: StudyKind, value: f64) -> Overrides {
    match kind {
        StudyKind::Noise => Overrides {
            snr: Some(value),
            ndp: None,
        },
        StudyKind::Ndp => Overrides {
            snr: None,
            ndp: Some(value as usize),
        },
        StudyKind::Rigidity => Overrides::default(),
    }
}

struct Item {
    point: usize,
    value: f64,
    replication: usize,
    beam: BeamConfig,
    cache_index: usize,
}

/// Runs the study in the config. Failures of single runs are recorded and
/// the sweep continues.
pub fn run_study(ctx: &Context) -> Result<StudyOutcome> {
    let section = ctx
        .cfg
        .study
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no study section".into()))?;
    if ctx.cfg.datasets.is_empty() {
        return Err(CliError::Config(
            "a study needs datasets to synthesize".into(),
        ));
    }
    let n_rep = replications(section, ctx.full_scale)?;
    let bcs = ctx.cfg.bcs.resolve(&ctx.beam);

    // placements depend on the beam only, so they are settled per point
    let mut caches = Vec::new();
    let mut items = Vec::new();
    for (p, &value) in section.values.iter().enumerate() {
        let beam = point_beam(ctx, section.kind, value)?;
        let mut cache = PlacementCache::default();
        let point_bcs = ctx.cfg.bcs.resolve(&beam);
        for spec in &ctx.cfg.datasets {
            crate::commands::base_locations(spec, ctx.cfg, &beam, &point_bcs, &mut cache)?;
        }
        caches.push(std::sync::Mutex::new(cache));
        for r in 0..n_rep {
            items.push(Item {
                point: p,
                value,
                replication: r,
                beam,
                cache_index: p,
            });
        }
    }
    let variants: &[bool] = if section.compare_bcs && !bcs.is_empty() {
        &[true, false]
    } else {
        &[true]
    };

    let runs: Vec<RunRecord> = items
        .par_iter()
        .flat_map_iter(|item| {
            let point_bcs = ctx.cfg.bcs.resolve(&item.beam);
            let noise_root = ctx.root_seed;
            let (p, r) = (item.point as u64, item.replication as u64);
            let chain_seed = derive(ctx.root_seed, Stream::Chain, &[p, r]);
            let data = {
                let mut cache = caches[item.cache_index]
                    .lock()
                    .expect("no panics while holding the lock");
                synthesize_all(
                    ctx.cfg,
                    &item.beam,
                    &point_bcs,
                    &mut cache,
                    overrides(section.kind, item.value),
                    |i| derive(noise_root, Stream::Noise, &[p, r, i as u64]),
                )
            };
            let data = data.and_then(|sets| {
                configure_datasets(ctx.cfg, &item.beam, sets.into_iter().map(|s| s.0).collect())
            });
            variants
                .iter()
                .map(|&with_bcs| {
                    let mut rec = RunRecord {
                        point: item.point,
                        value: item.value,
                        replication: item.replication,
                        with_bcs,
                        chain_seed,
                        error: None,
                        ei_mean: f64::NAN,
                        ei_std: f64::NAN,
                        kga_mean: f64::NAN,
                        kga_std: f64::NAN,
                        acceptance: f64::NAN,
                    };
                    let bc_set = if with_bcs {
                        point_bcs.clone()
                    } else {
                        Vec::new()
                    };
                    let result = data.as_ref().map_err(|e| e.to_string()).and_then(|sets| {
                        let chain = identify(ctx.cfg, &item.beam, sets, &bc_set, chain_seed)
                            .map_err(|e| e.to_string())?;
                        let s = summarize(&chain).map_err(|e| e.to_string())?;
                        Ok((s, chain.acceptance_rate))
                    });
                    match result {
                        Ok((s, acc)) => {
                            rec.ei_mean = s["EI"].mean / item.beam.ei;
                            rec.ei_std = s["EI"].std / item.beam.ei;
                            rec.kga_mean = s["kGA"].mean / item.beam.kga;
                            rec.kga_std = s["kGA"].std / item.beam.kga;
                            rec.acceptance = acc;
                        }
                        Err(e) => rec.error = Some(e),
                    }
                    rec
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let mut points = Vec::new();
    for (p, &value) in section.values.iter().enumerate() {
        for &with_bcs in variants {
            let here: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.point == p && r.with_bcs == with_bcs)
                .collect();
            let ok: Vec<&&RunRecord> = here.iter().filter(|r| r.error.is_none()).collect();
            let col =
                |f: fn(&RunRecord) -> f64| Band::of(&ok.iter().map(|r| f(r)).collect::<Vec<f64>>());
            points.push(SweepPoint {
                value,
                with_bcs,
                n_ok: ok.len(),
                n_failed: here.len() - ok.len(),
                ei_mean: col(|r| r.ei_mean),
                ei_std: col(|r| r.ei_std),
                kga_mean: col(|r| r.kga_mean),
                kga_std: col(|r| r.kga_std),
            });
        }
    }
    Ok(StudyOutcome { runs, points })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn runs_csv(runs: &[RunRecord]) -> String {
    let mut s = String::from("point,value,replication,with_bcs,chain_seed,status,ei_mean,ei_std,kga_mean,kga_std,acceptance\n");
    for r in runs {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.point,
            r.value,
            r.replication,
            r.with_bcs,
            r.chain_seed,
            csv_field(r.error.as_deref().unwrap_or("ok")),
            r.ei_mean,
            r.ei_std,
            r.kga_mean,
            r.kga_std,
            r.acceptance
        ));
    }
    s
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("value,with_bcs,n_ok,n_failed");
    for p in ["ei_mean", "ei_std", "kga_mean", "kga_std"] {
        s.push_str(&format!(",{p},{p}_lo,{p}_hi"));
    }
    s.push('\n');
    for p in points {
        s.push_str(&format!(
            "{},{},{},{}",
            p.value, p.with_bcs, p.n_ok, p.n_failed
        ));
        for b in [p.ei_mean, p.ei_std, p.kga_mean, p.kga_std] {
            s.push_str(&format!(",{},{},{}", b.mean, b.lo, b.hi));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_of_known_values() {
        let b = Band::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(b.mean, 2.5);
        assert!(b.lo >= 1.0 && b.hi <= 4.0 && b.lo < b.hi);
        assert!(Band::of(&[]).mean.is_nan());
    }

    #[test]
    fn error_messages_are_quoted() {
        assert_eq!(csv_field("ok"), "ok");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
    }
}
