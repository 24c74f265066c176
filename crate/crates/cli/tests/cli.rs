use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qwalk_core::{random, synthesize, TargetPovmSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("spawn qwalk")
}

fn ok(args: &[&str]) -> String {
    let out = qwalk(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn pipeline_closes_on_random_specs() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [2, 3, 4, 5] {
        let spec = random::rank1_spec(&mut rng, n);
        let spec_file = path(dir.path(), "spec.json");
        fs::write(&spec_file, serde_json::to_string(&spec).unwrap()).unwrap();
        let (prog, povm) = (path(dir.path(), "prog.json"), path(dir.path(), "povm.json"));
        ok(&["synthesize", "--spec", &spec_file, "--out", &prog]);
        for method in ["forward", "reverse"] {
            ok(&["extract", "--program", &prog, "--out", &povm, "--method", method]);
            let report: Value = serde_json::from_str(&ok(&["verify", "--povm", &povm])).unwrap();
            assert_eq!(report["pass"], true);
        }
    }
}

#[test]
fn synthesize_output_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let spec = qwalk_core::sic_spec();
    let spec_file = path(dir.path(), "sic.json");
    fs::write(&spec_file, serde_json::to_string(&spec).unwrap()).unwrap();
    let text = ok(&["synthesize", "--spec", &spec_file]);
    let parsed: qwalk_core::SynthesisResult = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, synthesize(&spec).unwrap());
}

#[test]
fn infeasible_spec_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec_file = path(dir.path(), "bad.json");
    fs::write(
        &spec_file,
        r#"{"targets":[{"weight":1,"state":[[1,0],[0,0]]},{"weight":1,"state":[[1,0],[0,0]]}]}"#,
    )
    .unwrap();
    assert_eq!(qwalk(&["synthesize", "--spec", &spec_file]).status.code(), Some(1));
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = path(dir.path(), "junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(qwalk(&["extract", "--program", &junk]).status.code(), Some(2));
    assert_eq!(qwalk(&["extract", "--program", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(qwalk(&["usd"]).status.code(), Some(2));
    assert_eq!(qwalk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        qwalk(&["run", "--program", &junk, "--coin", "1,0"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_rejects_incomplete_set() {
    let dir = tempfile::tempdir().unwrap();
    let povm = path(dir.path(), "povm.json");
    let up = "[[[1,0],[0,0]],[[0,0],[0,0]]]";
    fs::write(
        &povm,
        format!(r#"{{"elements":[{{"position":1,"matrix":{up}}},{{"position":-1,"matrix":{up}}}]}}"#),
    )
    .unwrap();
    let out = qwalk(&["verify", "--povm", &povm]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["completeness_defect"], 1.0);
}

#[test]
fn run_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let usd = qwalk_core::build_usd(std::f64::consts::FRAC_PI_3).unwrap();
    let prog = path(dir.path(), "usd.json");
    fs::write(&prog, serde_json::to_string(&usd.program).unwrap()).unwrap();

    let (s, c) = (std::f64::consts::FRAC_PI_6).sin_cos();
    let coin = format!("{c},0,{s},0");
    let state: Value = serde_json::from_str(&ok(&["run", "--program", &prog, "--coin", &coin])).unwrap();
    let xs: Vec<i64> = state["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["x"].as_i64().unwrap())
        .collect();
    assert_eq!(xs, vec![1, 3]);

    let csv_file = path(dir.path(), "trace.csv");
    ok(&["trace", "--program", &prog, "--coin", &coin, "--out", &csv_file]);
    let csv = fs::read_to_string(&csv_file).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,probability"));
    let last: Vec<(i64, f64)> = lines
        .filter(|l| l.starts_with("3,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(last.len(), 2);
    for (x, p) in last {
        assert!([1, 3].contains(&x));
        assert!((p - 0.5).abs() < 1e-12);
    }

    let bad = qwalk(&["run", "--program", &prog, "--coin", "1,0,1,0"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sic_trace_second_subroutine() {
    let dir = tempfile::tempdir().unwrap();
    let prog = path(dir.path(), "sic.json");
    fs::write(&prog, serde_json::to_string(&qwalk_core::build_sic().program).unwrap()).unwrap();
    let psi = qwalk_core::sic_complements()[1];
    let coin = format!("{},{},{},{}", psi.right.re, psi.right.im, psi.left.re, psi.left.im);
    let csv = ok(&["trace", "--program", &prog, "--coin", &coin]);
    let block: Vec<(i64, f64)> = csv
        .lines()
        .filter(|l| l.starts_with("4,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .filter(|(_, p)| *p > 1e-20)
        .collect();
    assert_eq!(block.len(), 2);
    assert_eq!(block[0].0, 0);
    assert!((block[0].1 - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(block[1].0, 4);
    assert!((block[1].1 - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn merge_command() {
    let dir = tempfile::tempdir().unwrap();
    let sic = path(dir.path(), "sic.json");
    fs::write(&sic, serde_json::to_string(&qwalk_core::build_sic()).unwrap()).unwrap();
    let merged = path(dir.path(), "merged.json");
    ok(&["merge", "--result", &sic, "--i", "0", "--j", "1", "--out", &merged]);
    let r: qwalk_core::SynthesisResult =
        serde_json::from_str(&fs::read_to_string(&merged).unwrap()).unwrap();
    assert_eq!(r.outcomes.keys().copied().collect::<Vec<_>>(), vec![1, 5, 7]);
    assert_eq!(qwalk(&["merge", "--result", &sic, "--i", "0", "--j", "5"]).status.code(), Some(1));
}

#[test]
fn sampling_is_deterministic_per_worker_count() {
    let a = ok(&["sic", "--samples", "20000", "--seed", "3", "--workers", "4"]);
    let b = ok(&["sic", "--samples", "20000", "--seed", "3", "--workers", "4"]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["sample"]["workers"], 4);
    assert_eq!(v["sample"]["total"], 20000);
}

#[test]
fn tomography_from_sampled_sic_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let report = ok(&["sic", "--coin", "0.6,0,0.8,0", "--samples", "200000", "--seed", "1"]);
    let v: Value = serde_json::from_str(&report).unwrap();
    let povm = path(dir.path(), "povm.json");
    fs::write(&povm, v["povm"].to_string()).unwrap();
    let freq = path(dir.path(), "freq.json");
    fs::write(&freq, v["sample"].to_string()).unwrap();

    let t: Value = serde_json::from_str(&ok(&["tomo", "--povm", &povm, "--freq", &freq])).unwrap();
    let rho: qwalk_core::Mat2 = serde_json::from_value(t["rho_hat"].clone()).unwrap();
    let want = qwalk_core::CoinState::from_real(0.6, 0.8).projector();
    assert!(qwalk_core::trace_distance(&rho, &want) < 1e-2);
    assert!(t["residual"].as_f64().unwrap() < 1e-2);
}

#[test]
fn tomography_needs_informationally_complete_set() {
    let dir = tempfile::tempdir().unwrap();
    let povm = path(dir.path(), "povm.json");
    fs::write(
        &povm,
        r#"{"elements":[{"position":1,"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]},{"position":-1,"matrix":[[[0,0],[0,0]],[[0,0],[1,0]]]}]}"#,
    )
    .unwrap();
    let freq = path(dir.path(), "freq.json");
    fs::write(
        &freq,
        r#"{"empirical":[{"position":1,"frequency":0.5},{"position":-1,"frequency":0.5}]}"#,
    )
    .unwrap();
    assert_eq!(qwalk(&["tomo", "--povm", &povm, "--freq", &freq]).status.code(), Some(1));
}

#[test]
fn spec_file_format_round_trips() {
    let text = r#"{"targets":[{"weight":1.0,"state":[[1.0,0.0],[0.0,0.0]]},{"weight":1.0,"state":[[0.0,0.0],[1.0,0.0]]}]}"#;
    let spec: TargetPovmSpec = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string(&spec).unwrap(), text);
}
