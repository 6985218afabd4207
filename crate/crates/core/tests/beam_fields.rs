//! Closed-form beam responses against their defining relations.

use timo_pigp::beam::{
    analytic_field, bernoulli_field, deflection_parts, peak_magnitude, rigidity_factor,
    shear_fraction, synthesize_dataset, BeamConfig, NoiseSpec,
};
use timo_pigp::gp::NoiseModel;
use timo_pigp::kernels::QuantityKind::{self, *};

fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * c(0.5 * h) - c(h)) / 3.0
}

fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * c(0.5 * h) - c(h)) / 3.0
}

fn configs() -> Vec<BeamConfig> {
    vec![
        BeamConfig::with_rigidity(1.0).unwrap(),
        BeamConfig::with_rigidity(1e-3).unwrap(),
        BeamConfig::new(3.0, 11330.0, 5.0e6, 670.0, 0.12).unwrap(),
    ]
}

fn field(cfg: &BeamConfig, kind: QuantityKind) -> impl Fn(f64) -> f64 + '_ {
    move |x| analytic_field(cfg, kind, x, None).unwrap()
}

#[test]
fn fields_satisfy_the_beam_relations() {
    for cfg in configs() {
        let h = 1e-3 * cfg.length;
        for i in 1..20 {
            let x = cfg.length * i as f64 / 20.0;
            let phi = field(&cfg, Rotation)(x);
            let m = field(&cfg, Moment)(x);
            let v = field(&cfg, Shear)(x);
            let q = field(&cfg, Load)(x);
            let tol = |scale: f64| 1e-7 * scale.abs().max(1e-300);
            assert!(
                (d1(field(&cfg, Deflection), x, h) - phi).abs()
                    < tol(peak_magnitude(&cfg, Rotation, None).unwrap())
            );
            assert!(
                (d1(field(&cfg, Moment), x, h) - v).abs()
                    < tol(peak_magnitude(&cfg, Shear, None).unwrap())
            );
            assert!((d1(field(&cfg, Shear), x, h) - q).abs() < tol(q));
            // w = w_b - M/kGA with EI w_b'' = M
            let wb = |t: f64| deflection_parts(&cfg, t).unwrap().0;
            assert!(
                (cfg.ei * d2(wb, x, 4.0 * h) - m).abs()
                    < 1e-6 * peak_magnitude(&cfg, Moment, None).unwrap()
            );
            // ε = -z φ'
            let z = 0.3 * cfg.height;
            let eps = analytic_field(&cfg, Strain, x, Some(z)).unwrap();
            let peak = peak_magnitude(&cfg, Strain, Some(z)).unwrap();
            assert!((eps + z * d1(field(&cfg, Rotation), x, h)).abs() < 1e-7 * peak);
        }
    }
}

#[test]
fn supports_carry_no_deflection_or_moment() {
    for cfg in configs() {
        for x in [0.0, cfg.length] {
            let scale = peak_magnitude(&cfg, Deflection, None).unwrap();
            assert!(field(&cfg, Deflection)(x).abs() <= 1e-14 * scale);
            assert_eq!(field(&cfg, Moment)(x), 0.0);
        }
    }
}

#[test]
fn midspan_deflection_and_load_equilibrium() {
    for cfg in configs() {
        let l = cfg.length;
        let w_mid = field(&cfg, Deflection)(0.5 * l);
        let expected =
            5.0 * cfg.q0 * l.powi(4) / (384.0 * cfg.ei) + cfg.q0 * l * l / (8.0 * cfg.kga);
        assert!((w_mid - expected).abs() < 1e-13 * expected.abs());
        // support reactions balance the load: V(L) - V(0) = q L
        let dv = field(&cfg, Shear)(l) - field(&cfg, Shear)(0.0);
        assert!((dv - cfg.q0 * l).abs() < 1e-12 * (cfg.q0 * l).abs());
        // trapezoid quadrature of V recovers M(L/2) - M(0)
        let n = 2000;
        let hx = 0.5 * l / n as f64;
        let integral: f64 = (0..n)
            .map(|k| {
                0.5 * hx
                    * (field(&cfg, Shear)(k as f64 * hx) + field(&cfg, Shear)((k + 1) as f64 * hx))
            })
            .sum();
        assert!((integral - field(&cfg, Moment)(0.5 * l)).abs() < 1e-10 * cfg.q0 * l * l);
    }
}

#[test]
fn shear_share_follows_rigidity() {
    let equal = BeamConfig::with_rigidity(0.3125).unwrap();
    assert!((shear_fraction(&equal).unwrap() - 0.5).abs() < 1e-12);
    let r = 3.125;
    let stiff = BeamConfig::with_rigidity(r).unwrap();
    assert!((shear_fraction(&stiff).unwrap() - 10.0 / 11.0).abs() < 1e-12);
    assert!((rigidity_factor(stiff.ei, stiff.length, stiff.kga).unwrap() - r).abs() < 1e-12);
    let mut last = 0.0;
    for r in [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2] {
        let s = shear_fraction(&BeamConfig::with_rigidity(r).unwrap()).unwrap();
        assert!(s > last);
        last = s;
    }
}

#[test]
fn bernoulli_fields_drop_shear() {
    let cfg = BeamConfig::with_rigidity(1.0).unwrap();
    for x in [0.1, 0.5, 0.9] {
        let (wb, _) = deflection_parts(&cfg, x).unwrap();
        assert_eq!(bernoulli_field(&cfg, Deflection, x, None).unwrap(), wb);
        assert_eq!(
            bernoulli_field(&cfg, Moment, x, None).unwrap(),
            field(&cfg, Moment)(x)
        );
    }
    assert!(bernoulli_field(&cfg, Strain, 0.5, None).is_err());
}

#[test]
fn outside_the_span_is_a_domain_error() {
    let cfg = BeamConfig::with_rigidity(1.0).unwrap();
    assert!(analytic_field(&cfg, Deflection, -0.1, None).is_err());
    assert!(analytic_field(&cfg, Deflection, 1.1, None).is_err());
    assert!(analytic_field(&cfg, Deflection, f64::NAN, None).is_err());
    assert!(BeamConfig::new(1.0, -1.0, 1.0, 1.0, 0.1).is_err());
}

#[test]
fn synthesized_noise_has_the_requested_spread() {
    let cfg = BeamConfig::with_rigidity(1.0).unwrap();
    let locations = vec![0.5; 20_000];
    let d = synthesize_dataset(
        &cfg,
        Deflection,
        &locations,
        None,
        &NoiseSpec::snr(20.0, 5),
        "w",
    )
    .unwrap();
    let truth = field(&cfg, Deflection)(0.5);
    let sigma = peak_magnitude(&cfg, Deflection, None).unwrap() / 20.0;
    assert_eq!(d.noise, NoiseModel::Fixed(sigma));
    let n = d.y.len() as f64;
    let mean = d.y.iter().sum::<f64>() / n;
    let sd = (d.y.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    // standard errors of the sample mean and sample standard deviation
    assert!((mean - truth).abs() < 4.0 * sigma / n.sqrt());
    assert!((sd - sigma).abs() < 4.0 * sigma / (2.0 * n).sqrt());
}

#[test]
fn noiseless_synthesis_reproduces_the_oracle() {
    let cfg = BeamConfig::with_rigidity(1.0).unwrap();
    let x = cfg.grid(11);
    let z: Vec<f64> = x.iter().map(|_| -0.5 * cfg.height).collect();
    let d =
        synthesize_dataset(&cfg, Strain, &x, Some(&z), &NoiseSpec::sigma(0.0, 0), "eps").unwrap();
    for (i, xi) in x.iter().enumerate() {
        assert_eq!(
            d.y[i],
            analytic_field(&cfg, Strain, *xi, Some(z[i])).unwrap()
        );
    }
}

#[test]
fn same_seed_same_noise() {
    let cfg = BeamConfig::with_rigidity(1.0).unwrap();
    let x = cfg.grid(7);
    let a = synthesize_dataset(&cfg, Rotation, &x, None, &NoiseSpec::snr(10.0, 9), "phi").unwrap();
    let b = synthesize_dataset(&cfg, Rotation, &x, None, &NoiseSpec::snr(10.0, 9), "phi").unwrap();
    let c = synthesize_dataset(&cfg, Rotation, &x, None, &NoiseSpec::snr(10.0, 10), "phi").unwrap();
    assert_eq!(a, b);
    assert_ne!(a.y, c.y);
}
