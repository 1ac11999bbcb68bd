use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn imfusion(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imfusion"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn imfusion")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = imfusion(args, cwd);
    assert!(
        out.status.success(),
        "imfusion {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn simulate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["simulate", "--preset", "toy", "--seed", "5", "--out", "a"], d);
    ok(&["simulate", "--preset", "toy", "--seed", "5", "--out", "b"], d);
    ok(&["simulate", "--preset", "toy", "--seed", "6", "--out", "c"], d);
    for f in ["mmr.jsonl", "dt.jsonl", "truth_icdm.csv", "regions.csv", "scenario.json", "simulation.json"] {
        assert_eq!(read(&d.join("a"), f), read(&d.join("b"), f), "{f}");
    }
    assert_ne!(read(&d.join("a"), "mmr.jsonl"), read(&d.join("c"), "mmr.jsonl"));
}

#[test]
fn scenario_without_roads_fails_with_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["simulate", "--preset", "toy", "--out", "toy"], d);
    let text = fs::read_to_string(d.join("toy/scenario.json")).unwrap();
    let mut scenario: serde_json::Value = serde_json::from_str(&text).unwrap();
    scenario["roads"] = serde_json::json!([]);
    fs::write(d.join("noroad.json"), scenario.to_string()).unwrap();

    let out = imfusion(&["simulate", "--scenario", "noroad.json", "--out", "x"], d);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("stage `simulate`"), "{err}");
    assert!(err.to_lowercase().contains("dt"), "{err}");
}

#[test]
fn parse_errors_name_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["simulate", "--preset", "toy", "--out", "s"], d);
    let mut mmr = fs::read_to_string(d.join("s/mmr.jsonl")).unwrap();
    mmr.push_str("{\"serving_id\": \"S\"\n");
    let line = mmr.lines().count();
    fs::write(d.join("bad.jsonl"), mmr).unwrap();
    let out = imfusion(&["bin", "--mmr", "bad.jsonl", "--dt", "s/dt.jsonl", "--out", "b"], d);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("stage `read`"), "{err}");
    assert!(err.contains(&format!("bad.jsonl:{line}")), "{err}");
}

#[test]
fn compare_identical_and_many() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["report", "--preset", "fusion", "--scenario-seed", "2", "--out", "r"], d);
    ok(&["compare", "r/im_mr.csv", "r/im_mr.csv", "--truth", "r/im_mr.csv", "--out", "same.json"], d);
    let same: serde_json::Value = serde_json::from_slice(&read(d, "same.json")).unwrap();
    assert_eq!(same["schema"], 1);
    assert!((same["pearson"][0]["pearson"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(same["errors"][0]["mae"], 0.0);
    assert_eq!(same["errors"][0]["support_mismatch"], 0);

    ok(
        &["compare", "r/im_mr.csv", "r/im_dt.csv", "r/im_dt_prime.csv", "--truth", "r/truth_icdm.csv", "--out", "three.json"],
        d,
    );
    let three: serde_json::Value = serde_json::from_slice(&read(d, "three.json")).unwrap();
    assert_eq!(three["pearson"].as_array().unwrap().len(), 3);
    assert_eq!(three["errors"].as_array().unwrap().len(), 3);
}

#[test]
fn rerun_from_intermediates_is_bit_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["report", "--preset", "fusion", "--scenario-seed", "3", "--out", "r"], d);
    // report seeds: clustering = scenario + 3, fusion = scenario + 4
    let seeds = ["--seed", "6", "--fusion-seed", "7"];

    let from_reinforced = ok(&["icdm", "--mmr", "r/fuse-mmrs/mmrs_reinforced.csv"], d);
    assert_eq!(from_reinforced.as_bytes(), read(d, "r/im_mr_prime.csv"));
    let from_reshaped = ok(&["icdm", "--dt", "r/fuse-dt/dt_reshaped.csv"], d);
    assert_eq!(from_reshaped.as_bytes(), read(d, "r/im_dt_prime.csv"));

    let mut args = vec!["fuse-mmrs", "--mmr", "r/fuse-mmrs/mmrs.csv", "--dt", "r/fuse-mmrs/dt.csv", "--out", "f"];
    args.extend(seeds);
    ok(&args, d);
    assert_eq!(read(d, "f/im_mr_prime.csv"), read(d, "r/im_mr_prime.csv"));
    assert_eq!(read(d, "f/mmrs_reinforced.csv"), read(d, "r/fuse-mmrs/mmrs_reinforced.csv"));

    let mut args = vec!["icdm", "--pipeline", "dt+mmrs", "--mmr", "r/simulation/mmr.jsonl", "--dt", "r/simulation/dt.jsonl"];
    args.extend(seeds);
    assert_eq!(ok(&args, d).as_bytes(), read(d, "r/im_dt_prime.csv"));
}

#[test]
fn config_file_drives_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("run.toml"),
        "output_dir = \"cfgout\"\n[input]\npreset = \"toy\"\n[simulation]\nseed = 9\nn_reports = 40\n",
    )
    .unwrap();
    ok(&["simulate", "--config", "run.toml"], d);
    let report: serde_json::Value = serde_json::from_slice(&read(d, "cfgout/simulation.json")).unwrap();
    assert_eq!(report["seed"], 9);
    assert_eq!(report["reports"], 40);

    fs::write(d.join("typo.toml"), "[clustering]\nkk = 3\n").unwrap();
    let out = imfusion(&["simulate", "--config", "typo.toml"], d);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("kk"));
}

#[test]
fn list_and_unknown_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let listed = ok(&["icdm", "--list"], tmp.path());
    for name in ["im-mr", "im-dt", "mmrs+dt", "dt+mmrs"] {
        assert!(listed.contains(name));
    }
    let out = imfusion(&["icdm", "--pipeline", "nope", "--mmr", "a", "--dt", "b"], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown pipeline"));
}
