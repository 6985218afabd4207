use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use timo_pigp::beam::{analytic_field, BeamConfig};
use timo_pigp::QuantityKind;

const BIN: &str = env!("CARGO_BIN_EXE_timo-pigp");

const SMALL: &str = r#"{
  "schema_version": 1,
  "seed": 5,
  "beam": {"rigidity": 1.0},
  "placement": {"n_points": 11, "n_sensors": 4},
  "datasets": [
    {"id": "w", "kind": "w", "locations": {"placement": {"criterion": "pi", "domain": "w"}}, "noise": {"snr": 20}, "ndp": 3},
    {"id": "phi", "kind": "phi", "locations": [0.0, 0.3, 0.6, 1.0], "noise": {"snr": 20}},
    {"id": "eps", "kind": "eps", "locations": [0.25, 0.75], "depths": [0.05], "noise": {"sigma_n": 0.0}},
    {"id": "q", "kind": "q", "locations": {"grid": 5}, "informed": true}
  ],
  "mcmc": {"n_total": 1500, "n_burn": 500, "n_thin": 5},
  "predict": {"quantities": ["w", "M", "eps"], "n_points": 21, "strain_grid": {"nx": 5, "nz": 3}, "max_draws": 20}
}"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_files(out: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_str()
                .unwrap()
                .starts_with("data_")
        })
        .map(|p| p.to_str().unwrap().to_string())
        .collect();
    v.sort();
    v
}

fn pipeline(cfg: &Path, out: &Path) {
    assert!(run(&["simulate", "--config", s(cfg), "--out", s(out)])
        .status
        .success());
    let data = data_files(out);
    let mut args = vec!["identify", "--config", s(cfg), "--out", s(out), "--data"];
    args.extend(data.iter().map(String::as_str));
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let chain = out.join("chain.csv");
    let mut args = vec![
        "predict",
        "--config",
        s(cfg),
        "--out",
        s(out),
        "--chain",
        s(&chain),
        "--data",
    ];
    args.extend(data.iter().map(String::as_str));
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_identify_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    pipeline(&cfg, &out);

    for f in [
        "chain.csv",
        "summary.json",
        "diagnostics.json",
        "pred_w.csv",
        "pred_M.csv",
        "pred_eps.csv",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    // every file on disk is in the manifest, with the config hash
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_object().unwrap();
    for entry in fs::read_dir(&out).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name != "manifest.json" {
            assert!(files.contains_key(&name), "{name} not in manifest");
            assert_eq!(files[&name]["config_hash"].as_str().unwrap().len(), 64);
        }
    }
    assert!(files["data_w.csv"]["seed"].is_u64());
    assert!(files["chain.csv"]["seed"].is_u64());

    // strain grid has nx * nz rows
    let eps = fs::read_to_string(out.join("pred_eps.csv")).unwrap();
    assert_eq!(eps.lines().count(), 1 + 15);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_draws"], 200);
}

#[test]
fn repeats_and_noise_free_sets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert!(run(&["simulate", "--config", s(&cfg), "--out", s(&out)])
        .status
        .success());

    let w = fs::read_to_string(out.join("data_w.csv")).unwrap();
    let rows: Vec<Vec<&str>> = w.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    for chunk in rows.chunks(3) {
        // each location three times, each with its own noise draw
        assert!(chunk.iter().all(|r| r[1] == chunk[0][1]));
        assert!(chunk[0][3] != chunk[1][3] && chunk[1][3] != chunk[2][3]);
    }

    let beam = BeamConfig::with_rigidity(1.0).unwrap();
    let eps = fs::read_to_string(out.join("data_eps.csv")).unwrap();
    for line in eps.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (x, z, v): (f64, f64, f64) = (
            f[1].parse().unwrap(),
            f[2].parse().unwrap(),
            f[3].parse().unwrap(),
        );
        assert_eq!(
            v,
            analytic_field(&beam, QuantityKind::Strain, x, Some(z)).unwrap()
        );
    }
    let q = fs::read_to_string(out.join("data_q.csv")).unwrap();
    assert!(q.lines().skip(1).all(|l| l.split(',').nth(3) == Some("1")));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    pipeline(&cfg, &a);
    pipeline(&cfg, &b);
    for f in [
        "data_w.csv",
        "data_phi.csv",
        "chain.csv",
        "pred_w.csv",
        "pred_M.csv",
        "pred_eps.csv",
        "manifest.json",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f} differs"
        );
    }
    let c = dir.path().join("c");
    assert!(run(&[
        "simulate",
        "--config",
        s(&cfg),
        "--out",
        s(&c),
        "--seed",
        "6"
    ])
    .status
    .success());
    assert_ne!(
        fs::read(a.join("data_w.csv")).unwrap(),
        fs::read(c.join("data_w.csv")).unwrap()
    );
}

#[test]
fn malformed_data_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "quantity,x,z,value,dataset_id\nw,0.1,,1e-3,w\nw,0.2,,nope,w\n",
    )
    .unwrap();
    let o = run(&[
        "identify",
        "--config",
        s(&cfg),
        "--out",
        s(&dir.path().join("o")),
        "--data",
        s(&bad),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    // unknown quantity in the prediction list
    let cfg = write_config(
        dir.path(),
        &SMALL.replace(r#"["w", "M", "eps"]"#, r#"["w", "theta"]"#),
    );
    let o = run(&[
        "predict",
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--chain",
        "x.csv",
        "--data",
        "y.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    // exhaustive map over 31 choose 7 without --full-scale
    let guarded = r#"{"schema_version": 1, "beam": {"rigidity": 1.0},
        "placement": {"entropy_map": "exhaustive", "max_combos": 1000}}"#;
    let cfg = write_config(dir.path(), guarded);
    let o = run(&["place", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--full-scale"));
    // worker pool size
    let cfg = write_config(dir.path(), SMALL);
    let o = Command::new(BIN)
        .args(["simulate", "--config", s(&cfg), "--out", s(&out)])
        .env("TIMO_PIGP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(BIN)
        .args(["simulate", "--config", s(&cfg), "--out", s(&out)])
        .env("TIMO_PIGP_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn stuck_chain_exits_with_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    // steps fifty times wider than the stiffness supports are never accepted
    let text = SMALL.replace(
        r#""mcmc": {"n_total": 1500, "n_burn": 500, "n_thin": 5}"#,
        r#""mcmc": {"n_total": 3000, "n_burn": 100, "n_thin": 5, "adapt": false, "proposal_scale": [50, 50, 50, 50, 50, 50]}"#,
    );
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("o");
    assert!(run(&["simulate", "--config", s(&cfg), "--out", s(&out)])
        .status
        .success());
    let data = data_files(&out);
    let mut args = vec!["identify", "--config", s(&cfg), "--out", s(&out), "--data"];
    args.extend(data.iter().map(String::as_str));
    let o = run(&args);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn zero_sensors_give_an_empty_placement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "beam": {"rigidity": 1.0}, "placement": {"n_points": 31, "n_sensors": 0}}"#,
    );
    let out = dir.path().join("o");
    let o = run(&["place", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success());
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("placement.json")).unwrap()).unwrap();
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 6);
    assert!(results
        .iter()
        .all(|r| r["indices"].as_array().unwrap().is_empty()));
}

#[test]
fn small_placement_map_brackets_the_greedy_sets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "beam": {"rigidity": 1.0},
            "placement": {"n_points": 10, "n_sensors": 3, "entropy_map": "exhaustive"}}"#,
    );
    let out = dir.path().join("o");
    assert!(run(&["place", "--config", s(&cfg), "--out", s(&out)])
        .status
        .success());
    let map = fs::read_to_string(out.join("entropy_map_w.csv")).unwrap();
    assert_eq!(map.lines().count(), 1 + 120);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("placement.json")).unwrap()).unwrap();
    for r in report["results"].as_array().unwrap() {
        let n = r["normalized_pi_entropy"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&n));
        if r["criterion"] == "physics_informed_entropy" {
            assert!(n >= 0.95, "{r}");
        }
    }
}
