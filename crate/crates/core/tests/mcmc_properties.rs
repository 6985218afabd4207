use timo_pigp::beam::{synthesize_dataset, BeamConfig, NoiseSpec};
use timo_pigp::gp::{
    assemble, log_marginal_likelihood, BoundaryCondition, Dataset, NoiseModel, Theta,
};
use timo_pigp::kernels::QuantityKind;
use timo_pigp::mcmc::{
    autocorrelation, default_theta0, log_posterior, run_chain, sample, summarize, summarize_values,
    McmcConfig, ParamLayout, PriorSpec,
};
use timo_pigp::Error;

fn gaussian(u: &[f64]) -> f64 {
    -0.5 * u[0] * u[0]
}

#[test]
fn gaussian_target_moments_and_quantiles() {
    let cfg = McmcConfig {
        n_total: 200_000,
        n_burn: 5_000,
        n_thin: 10,
        seed: 3,
        ..McmcConfig::default()
    };
    let chain = sample(gaussian, &[2.0], &[1.0], &cfg).unwrap();
    let xs: Vec<f64> = chain.samples.iter().map(|s| s[0]).collect();
    let s = summarize_values(&xs).unwrap();
    assert!(s.ess > 5_000.0, "ess {}", s.ess);
    let se_mean = 1.0 / s.ess.sqrt();
    assert!(s.mean.abs() < 4.0 * se_mean, "mean {}", s.mean);
    assert!((s.std * s.std - 1.0).abs() < 0.1);
    // standard normal quartiles
    assert!((s.q25 + 0.6744897501960817).abs() < 0.05);
    assert!((s.q75 - 0.6744897501960817).abs() < 0.05);
    assert!((s.q975 - 1.959963984540054).abs() < 0.1);
    assert!(chain.acceptance_rate > 0.2 && chain.acceptance_rate < 0.6);
}

#[test]
fn thinned_draws_are_nearly_independent() {
    let cfg = McmcConfig {
        n_total: 50_000,
        n_burn: 5_000,
        seed: 21,
        ..McmcConfig::default()
    };
    let chain = sample(gaussian, &[0.0], &[1.0], &cfg).unwrap();
    let xs: Vec<f64> = chain.samples.iter().map(|s| s[0]).collect();
    let rho = autocorrelation(&xs, 1);
    assert!(rho < 0.3, "lag-1 autocorrelation {rho}");
}

/// Piecewise-constant target on two cells `[0, 1)` and `[1, 2)` with
/// weights 1 and 3. The stationary chain must balance the probability flow
/// between the cells: `π₁ P(1→2) = π₂ P(2→1)`.
#[test]
fn two_cell_target_is_in_detailed_balance() {
    let target = |u: &[f64]| match u[0] {
        x if (0.0..1.0).contains(&x) => 0.0,
        x if (1.0..2.0).contains(&x) => 3f64.ln(),
        _ => f64::NEG_INFINITY,
    };
    let cfg = McmcConfig {
        n_total: 400_001,
        n_burn: 1_000,
        n_thin: 1,
        adapt: false,
        seed: 5,
        ..McmcConfig::default()
    };
    let chain = sample(target, &[0.5], &[0.7], &cfg).unwrap();
    let cells: Vec<usize> = chain.samples.iter().map(|s| s[0] as usize).collect();
    let (mut n1, mut n2, mut t12, mut t21) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for w in cells.windows(2) {
        match (w[0], w[1]) {
            (0, 1) => t12 += 1.0,
            (1, 0) => t21 += 1.0,
            _ => {}
        }
        if w[0] == 0 {
            n1 += 1.0
        } else {
            n2 += 1.0
        }
    }
    let (pi1, pi2) = (0.25f64, 0.75f64);
    let p12 = t12 / n1;
    let p21 = t21 / n2;
    // binomial standard errors of the two transition frequencies
    let se = ((pi1 * pi1) * p12 * (1.0 - p12) / n1 + (pi2 * pi2) * p21 * (1.0 - p21) / n2).sqrt();
    assert!(
        (pi1 * p12 - pi2 * p21).abs() < 3.0 * se,
        "{} vs {} (se {se})",
        pi1 * p12,
        pi2 * p21
    );
    // occupancy tracks the cell weights
    let frac = n2 / (n1 + n2);
    assert!((frac - pi2).abs() < 0.02, "occupancy {frac}");
}

#[test]
fn vanishing_step_accepts_everything_and_stays_put() {
    let cfg = McmcConfig {
        n_total: 2_000,
        n_burn: 100,
        adapt: false,
        seed: 1,
        ..McmcConfig::default()
    };
    let chain = sample(gaussian, &[0.7], &[1e-9], &cfg).unwrap();
    assert!(chain.acceptance_rate > 0.99);
    assert!(chain.samples.iter().all(|s| (s[0] - 0.7).abs() < 1e-6));
}

#[test]
fn isolated_start_is_reported_as_stuck() {
    let target = |u: &[f64]| if u[0] == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    let cfg = McmcConfig {
        n_total: 5_000,
        n_burn: 100,
        seed: 2,
        ..McmcConfig::default()
    };
    match sample(target, &[0.0], &[1.0], &cfg) {
        Err(Error::StuckChain { rejected, .. }) => assert_eq!(rejected, cfg.stuck_limit()),
        other => panic!("expected a stuck chain, got {other:?}"),
    }
}

#[test]
fn summaries_of_simple_sequences() {
    let flat = summarize_values(&[2.5; 50]).unwrap();
    assert_eq!(flat.std, 0.0);
    assert_eq!(flat.mean, 2.5);
    let two = summarize_values(&[1.0, 3.0]).unwrap();
    assert_eq!(two.mean, 2.0);
    assert_eq!(two.std, 1.0);
    assert!(summarize_values(&[]).is_err());
}

fn beam_problem() -> (BeamConfig, Vec<Dataset>, Vec<BoundaryCondition>, PriorSpec) {
    let cfg = BeamConfig::with_rigidity(1.0).unwrap();
    let xs = [0.1, 0.3, 0.5, 0.7, 0.9];
    let w = synthesize_dataset(
        &cfg,
        QuantityKind::Deflection,
        &xs,
        None,
        &NoiseSpec::snr(20.0, 1),
        "w",
    )
    .unwrap();
    let sw = w.noise.value();
    let phi = synthesize_dataset(
        &cfg,
        QuantityKind::Rotation,
        &xs,
        None,
        &NoiseSpec::snr(20.0, 2),
        "phi",
    )
    .unwrap();
    let sp = phi.noise.value();
    let q = Dataset::informed_load(cfg.q0, &xs, "q").unwrap();
    let data = vec![
        w.with_noise(NoiseModel::Learn(sw)),
        phi.with_noise(NoiseModel::Learn(sp)),
        q,
    ];
    let priors = PriorSpec::bounded_stiffness(cfg.ei, cfg.kga, 0.5, 1.5).unwrap();
    (cfg, data, BoundaryCondition::simply_supported(1.0), priors)
}

#[test]
fn flat_priors_leave_the_likelihood_unchanged() {
    let (cfg, data, bcs, _) = beam_problem();
    let theta = Theta::new(1e-3, 0.4, cfg.ei, cfg.kga).fill_noise_from(&data);
    let model = assemble(&data, &bcs, &theta).unwrap();
    let lml = log_marginal_likelihood(&model, model.targets().as_slice()).unwrap();
    assert_eq!(
        log_posterior(&theta, &data, &bcs, &PriorSpec::default()).unwrap(),
        lml
    );
    let bounded = PriorSpec::bounded_stiffness(cfg.ei, cfg.kga, 0.5, 1.5).unwrap();
    let lp = log_posterior(&theta, &data, &bcs, &bounded).unwrap();
    // U(0.5, 1.5) x truth has width equal to the true value
    assert!((lp - (lml - cfg.ei.ln() - cfg.kga.ln())).abs() < 1e-9 * lml.abs());
    let outside = Theta {
        ei: 1.6 * cfg.ei,
        ..theta
    };
    assert_eq!(
        log_posterior(&outside, &data, &bcs, &bounded).unwrap(),
        f64::NEG_INFINITY
    );
}

#[test]
fn beam_chain_respects_bounds_and_is_reproducible() {
    let (cfg, data, bcs, priors) = beam_problem();
    let theta0 = default_theta0(&data, &priors, cfg.length).unwrap();
    let mc = McmcConfig {
        n_total: 3_000,
        n_burn: 1_000,
        n_thin: 5,
        seed: 17,
        ..McmcConfig::default()
    };
    let a = run_chain(&data, &bcs, &priors, &mc, &theta0).unwrap();
    let b = run_chain(&data, &bcs, &priors, &mc, &theta0).unwrap();
    assert_eq!(a.draws, b.draws);
    assert_eq!(a.log_posterior, b.log_posterior);
    assert_eq!(a.len(), 400);
    for t in &a.draws {
        assert!(t.ei >= 0.5 * cfg.ei && t.ei <= 1.5 * cfg.ei);
        assert!(t.kga >= 0.5 * cfg.kga && t.kga <= 1.5 * cfg.kga);
        assert!(t.sigma_s2 > 0.0 && t.ell > 0.0 && t.sigma_n.values().all(|s| *s > 0.0));
    }
    assert!(a.acceptance_rate > 0.0 && a.acceptance_rate < 1.0);
    let other = run_chain(
        &data,
        &bcs,
        &priors,
        &McmcConfig {
            seed: 18,
            ..mc.clone()
        },
        &theta0,
    )
    .unwrap();
    assert_ne!(a.draws, other.draws);

    let s = summarize(&a).unwrap();
    let layout = ParamLayout::for_theta(&theta0);
    assert_eq!(s.keys().count(), layout.dim());
    assert!(s.contains_key("sigma_n:w") && s.contains_key("sigma_n:phi"));
}

#[test]
fn start_outside_support_is_rejected() {
    let (cfg, data, bcs, priors) = beam_problem();
    let mut theta0 = default_theta0(&data, &priors, cfg.length).unwrap();
    theta0.kga = 10.0 * cfg.kga;
    assert!(run_chain(&data, &bcs, &priors, &McmcConfig::default(), &theta0).is_err());
}
