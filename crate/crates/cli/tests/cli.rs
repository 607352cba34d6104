//! End-to-end checks of the `mkperc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn mkperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkperc"))
        .args(args)
        .env_remove("MKPERC_WORKERS")
        .output()
        .expect("spawn mkperc")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const SMALL: &str = r#"{ "N": 80, "d_side": 15, "oh": 1, "max_ticks": 300, "seed": 5, "metrics_every": 10 }"#;

#[test]
fn missing_config_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = mkperc(&["run", "--config", path(&missing), "--out", path(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn invalid_values_are_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{ "N": 0 }"#).unwrap();
    let out = mkperc(&["run", "--config", path(&cfg), "--out", path(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&cfg, SMALL).unwrap();
    let out = mkperc(&["run", "--config", path(&cfg), "--pforg", "1.5"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mkperc(&["sweep", "--preset", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mkperc(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(env!("CARGO_BIN_EXE_mkperc"))
        .args(["run", "--config", path(&cfg)])
        .env("MKPERC_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_documents_every_config_field() {
    let out = mkperc(&["run", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for field in [
        "d_side", "ng", "N ", "m ", "oh", "pforg", "chgr", "p_change", "seed", "max_ticks", "MKPERC_WORKERS",
    ] {
        assert!(text.contains(field), "help lacks {field}");
    }
}

#[test]
fn same_seed_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out_dir, extra) in [(&a, None), (&b, Some("--sequential"))] {
        let mut args = vec!["run", "--config", path(&cfg), "--out", path(out_dir), "--events", "--no-early-stop"];
        args.extend(extra);
        let out = mkperc(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["metrics.csv", "events.csv", "thresholds.json", "snapshots/meeting_t00000256.net"] {
        let x = std::fs::read(a.join(file)).unwrap();
        assert_eq!(x, std::fs::read(b.join(file)).unwrap(), "{file} differs");
    }
    let manifest = json(&a.join("manifest.json"));
    assert_eq!(manifest["seed"], 5);
    let files = manifest["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f["path"] == "metrics.csv" && f["sha256"].as_str().unwrap().len() == 64));
    assert!(!files.iter().any(|f| f["path"] == "manifest.json"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "N = 50\nd_side = 10\nmax_ticks = 40\n").unwrap();
    let out_dir = dir.path().join("o");
    let out = mkperc(&[
        "run", "--config", path(&cfg), "--out", path(&out_dir), "--n", "30", "--seed", "9", "--no-snapshots",
        "--no-early-stop",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written = json(&out_dir.join("config.json"));
    assert_eq!(written["N"], 30);
    assert_eq!(written["seed"], 9);
    assert!(!out_dir.join("snapshots").exists());
}

#[test]
fn analyze_recovers_the_run_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let run_dir = dir.path().join("run");
    assert!(mkperc(&["run", "--config", path(&cfg), "--out", path(&run_dir)]).status.success());
    let out = mkperc(&["analyze", "--in", path(&run_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let analysis = json(&run_dir.join("analysis.json"));
    let thresholds = json(&run_dir.join("thresholds.json"));
    for net in ["knowledge", "meeting"] {
        assert_eq!(analysis[net]["t_c"], thresholds[net]["t_c"]);
        assert_eq!(analysis[net]["n_b"], thresholds[net]["n_b"]);
    }
    assert!(!analysis["snapshots"].as_array().unwrap().is_empty());

    let out = mkperc(&["analyze", "--in", path(&dir.path().join("empty"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_from_spec_file_respects_max_n() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    std::fs::write(
        &spec,
        r#"{
            "name": "tiny",
            "base": { "d_side": 20, "oh": 1, "max_ticks": 200 },
            "axis": { "param": "N", "values": [20, 40, 100000] },
            "replicates": 2,
            "master_seed": 3
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("sweep");
    let out = mkperc(&["sweep", "--spec", path(&spec), "--out", path(&out_dir), "--max-n", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result = json(&out_dir.join("result.json"));
    assert_eq!(result["cells"].as_array().unwrap().len(), 2);
    assert_eq!(result["runs"].as_array().unwrap().len(), 4);
    for file in ["summary.csv", "runs.csv", "specs.json", "manifest.json", "runs/N_20_r0.csv"] {
        assert!(out_dir.join(file).is_file(), "missing {file}");
    }
    let out = mkperc(&["sweep", "--spec", path(&spec), "--out", path(&out_dir), "--max-n", "10"]);
    assert_eq!(out.status.code(), Some(1));
}
