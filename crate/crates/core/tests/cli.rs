use std::path::Path;
use std::process::{Command, Output};

use ising_robust::estimator::{estimate_lambda_grid, EstimatorSettings};
use ising_robust::graphs::read_edge_list;
use ising_robust::model::read_spins;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ising-robust"));
    cmd.env_remove("ISING_ROBUST_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn read(path: &str) -> Vec<u8> {
    std::fs::read(Path::new(path)).unwrap()
}

#[test]
fn generate_sample_estimate_pipeline() {
    let dir = TempDir::new().unwrap();
    let (g, s1, s2) = (p(&dir, "g.edges"), p(&dir, "a.spins"), p(&dir, "b.spins"));
    ok(&[
        "generate-graph",
        "--kind",
        "lattice2d",
        "--n",
        "16",
        "--out",
        &g,
    ]);
    ok(&[
        "sample", "--graph", &g, "--beta", "0.5", "--k", "1", "--seed", "7", "--out", &s1,
    ]);
    ok(&[
        "sample", "--graph", &g, "--beta", "0.5", "--k", "1", "--seed", "7", "--out", &s2,
    ]);
    assert_eq!(read(&s1), read(&s2));
    assert_eq!(String::from_utf8(read(&s1)).unwrap().lines().count(), 16);
    assert!(read(&g).ends_with(b"\n") && read(&s1).ends_with(b"\n"));

    let json = ok(&[
        "estimate", "--graph", &g, "--sample", &s1, "--lambda", "0,0.5,1",
    ]);
    assert!(json.ends_with('\n'));
    let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(records.len(), 3);
    for key in [
        "lambda",
        "beta_hat",
        "kind",
        "score",
        "objective",
        "iterations",
    ] {
        assert!(records[0].get(key).is_some(), "{key}");
    }

    // thin adapter: same numbers as the library
    let j = read_edge_list(&g).unwrap();
    let x = read_spins(&s1).unwrap();
    let lib =
        estimate_lambda_grid(&j, &x, &[0.0, 0.5, 1.0], &EstimatorSettings::default()).unwrap();
    for (rec, (_, o)) in records.iter().zip(lib) {
        match rec["beta_hat"].as_f64() {
            Some(b) => assert_eq!(b, o.beta_hat),
            None => assert!(o.beta_hat.is_nan()),
        }
        assert_eq!(rec["kind"].as_str().unwrap(), o.kind.as_str());
    }
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let g = p(&dir, "g.edges");
    ok(&[
        "generate-graph",
        "--kind",
        "erdos-renyi",
        "--n",
        "30",
        "--p",
        "0.2",
        "--seed",
        "5",
        "--out",
        &g,
    ]);
    let explicit = ok(&[
        "sample", "--graph", &g, "--beta", "0.3", "--k", "3", "--seed", "5",
    ]);
    let out = bin()
        .args(["sample", "--graph", &g, "--beta", "0.3", "--k", "3"])
        .env("ISING_ROBUST_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), explicit);
    assert_eq!(explicit.lines().count(), 3);

    let bad = bin()
        .args(["sample", "--graph", &g, "--beta", "0.3"])
        .env("ISING_ROBUST_SEED", "nope")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn contaminate_and_ges() {
    let dir = TempDir::new().unwrap();
    let (g, s, c) = (p(&dir, "g.edges"), p(&dir, "s.spins"), p(&dir, "c.spins"));
    ok(&[
        "generate-graph",
        "--kind",
        "path1d",
        "--n",
        "12",
        "--out",
        &g,
    ]);
    ok(&[
        "sample", "--graph", &g, "--beta", "0.8", "--seed", "1", "--out", &s,
    ]);
    ok(&[
        "contaminate",
        "--sample",
        &s,
        "--contaminate",
        "flip:0.25",
        "--seed",
        "2",
        "--out",
        &c,
    ]);
    let x = read_spins(&s).unwrap();
    let y = read_spins(&c).unwrap();
    assert_eq!(x.hamming(&y), 3);

    let csv = ok(&[
        "ges", "--graph", &g, "--sample", &s, "--beta", "0.8", "--lambda", "0:1:0.5",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "lambda,ges,method");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].ends_with(",exact_enumeration"));
}

#[test]
fn experiment_and_predictions() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "spec.json");
    std::fs::write(
        &cfg,
        r#"{"ensemble": {"kind": "lattice2d", "n": 64}, "true_beta": 0.5,
            "contamination": [{"kind": "pin_plus", "fraction": 0.0}, {"kind": "pin_plus", "fraction": 0.2}],
            "lambdas": [0, 1], "replicates": 6, "base_seed": 3}"#,
    )
    .unwrap();
    let (r1, r2) = (p(&dir, "r1.csv"), p(&dir, "r2.csv"));
    ok(&[
        "experiment",
        "--config",
        &cfg,
        "--out",
        &r1,
        "--threads",
        "1",
    ]);
    ok(&[
        "experiment",
        "--config",
        &cfg,
        "--out",
        &r2,
        "--threads",
        "3",
    ]);
    assert_eq!(read(&r1), read(&r2));
    let text = String::from_utf8(read(&r1)).unwrap();
    assert!(text.starts_with(
        "lambda,contamination_kind,contamination_fraction,mse,bias,n_interior,n_left_boundary,n_right_divergent,n_degenerate,replicates\n"
    ));
    assert_eq!(text.lines().count(), 5);

    let (g, s, train, test) = (
        p(&dir, "g.edges"),
        p(&dir, "s.spins"),
        p(&dir, "train.csv"),
        p(&dir, "test.csv"),
    );
    ok(&[
        "generate-graph",
        "--kind",
        "lattice2d",
        "--n",
        "49",
        "--out",
        &g,
    ]);
    ok(&[
        "sample", "--graph", &g, "--beta", "0.5", "--seed", "4", "--out", &s,
    ]);
    ok(&[
        "sample", "--graph", &g, "--beta", "0.8", "--k", "5", "--seed", "5", "--out", &train,
    ]);
    ok(&[
        "sample", "--graph", &g, "--beta", "0.8", "--k", "5", "--seed", "6", "--out", &test,
    ]);
    let loo = ok(&[
        "predict-loo",
        "--graph",
        &g,
        "--sample",
        &s,
        "--lambda",
        "0,1",
    ]);
    assert_eq!(loo.lines().next(), Some("lambda,accuracy,fallback_nodes"));
    assert_eq!(loo.lines().count(), 3);
    let split = ok(&[
        "predict-split",
        "--graph",
        &g,
        "--train",
        &train,
        "--test",
        &test,
        "--lambda",
        "0,1",
    ]);
    assert_eq!(split.lines().count(), 3);
}

#[test]
fn error_exit_codes() {
    let out = run(&["experiment", "--config", "/nonexistent/missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("missing.json") && err.contains("IoError"),
        "{err}"
    );

    let out = run(&["estimate", "--graph", "g"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["generate-graph", "--kind", "erdos-renyi", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["generate-graph", "--kind", "lattice2d", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("InvalidSpec"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
