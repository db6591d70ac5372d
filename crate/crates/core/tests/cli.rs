use std::path::{Path, PathBuf};
use std::process::Command;

use extrainv_core::io::{read_vectors_csv, write_vectors_csv};
use extrainv_core::scenarios::random_vector;
use rand::SeedableRng;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extrainv"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> (i32, Value, String) {
    let out = bin().args(args).arg("--config").arg(config).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, String::from_utf8(out.stderr).unwrap())
}

fn z12(extra: Value) -> Value {
    let mut cfg = json!({
        "version": 1,
        "group": { "moduli": [12] },
        "gamma": [[4]],
        "delta": [[2]],
        "action": { "regular": { "orbits": 1 } },
    });
    for (k, v) in extra.as_object().unwrap() {
        cfg[k] = v.clone();
    }
    cfg
}

#[test]
fn validate_reports_chain_indices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z12.json", &z12(json!({})));
    let (code, report, _) = run(&["validate"], &cfg);
    assert_eq!(code, 0);
    let chain = &report["chain"];
    assert_eq!(chain["index_t_gamma"], 4);
    assert_eq!(chain["index_t_delta"], 2);
    assert_eq!(chain["index_delta_gamma"], 2);
    assert_eq!(report["self_test"]["ok"], true);
}

#[test]
fn malformed_configs_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad_perm = json!({
        "version": 1,
        "group": { "moduli": [2] },
        "gamma": [[1]],
        "delta": [[1]],
        "action": { "points": 2, "generators": [[0, 0]] },
    });
    let cfg = write_config(dir.path(), "perm.json", &bad_perm);
    let (code, _, stderr) = run(&["validate"], &cfg);
    assert_eq!(code, 1);
    assert!(stderr.contains("action.generators[0]"), "{stderr}");

    let unknown = write_config(dir.path(), "unknown.json", &z12(json!({ "optoins": {} })));
    assert_eq!(run(&["validate"], &unknown).0, 1);

    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["validate"], &missing).0, 1);
}

#[test]
fn non_free_action_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let fixed = json!({
        "version": 1,
        "group": { "moduli": [2] },
        "gamma": [[1]],
        "delta": [[1]],
        "action": { "points": 2, "generators": [[0, 1]] },
    });
    let cfg = write_config(dir.path(), "fixed.json", &fixed);
    assert_eq!(run(&["validate"], &cfg).0, 2);
}

#[test]
fn partition_of_shear_and_dilation() {
    let dir = tempfile::tempdir().unwrap();
    let shear = json!({
        "version": 1,
        "group": { "moduli": [6] },
        "gamma": [[0]],
        "delta": [[3]],
        "action": { "regular": { "orbits": 1 } },
    });
    let cfg = write_config(dir.path(), "shear.json", &shear);
    let (code, report, _) = run(&["partition"], &cfg);
    assert_eq!(code, 0);
    assert_eq!(report["blocks"], json!([[0, 2, 4], [1, 3, 5]]));

    let dilation = json!({
        "version": 1,
        "group": { "moduli": [4] },
        "gamma": [[0]],
        "delta": [[2]],
        "action": { "regular": { "orbits": 1 } },
    });
    let cfg = write_config(dir.path(), "dilation.json", &dilation);
    let (code, report, _) = run(&["partition"], &cfg);
    assert_eq!(code, 0);
    assert_eq!(report["blocks"], json!([[0, 2], [1, 3]]));
}

#[test]
fn check_canonical_and_generic_spaces() {
    let dir = tempfile::tempdir().unwrap();
    let canonical = write_config(dir.path(), "c.json", &z12(json!({ "subspace": { "canonical": true } })));
    let (code, report, _) = run(&["check"], &canonical);
    assert_eq!(code, 0);
    assert_eq!(report["extra_invariance"]["delta_invariant"], true);
    assert_eq!(report["decomposable"]["decomposable"], true);

    let generic = write_config(dir.path(), "g.json", &z12(json!({ "subspace": { "random": 1 } })));
    let frame = dir.path().join("frame.csv");
    let out = bin()
        .args(["check", "--seed", "3", "--config"])
        .arg(&generic)
        .arg("--frame")
        .arg(&frame)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["extra_invariance"]["delta_invariant"], false);
    let cols = read_vectors_csv(std::fs::File::open(&frame).unwrap()).unwrap();
    assert_eq!(cols.len() as u64, report["dim"].as_u64().unwrap());
}

#[test]
fn approx_reads_csv_data() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let psi = vec![random_vector(&mut rng, 12)];
    write_vectors_csv(std::fs::File::create(dir.path().join("psi.csv")).unwrap(), &psi).unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        &z12(json!({ "data": { "csv": "psi.csv" }, "options": { "ell": 1 } })),
    );
    let (code, report, _) = run(&["approx"], &cfg);
    assert_eq!(code, 0);
    assert!(report["result"]["error"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(report["result"]["length"], 1);

    let extra = write_config(
        dir.path(),
        "b.json",
        &z12(json!({ "data": { "random": 3 }, "options": { "ell": 1, "problem": "extra" } })),
    );
    let (code, report, _) = run(&["approx"], &extra);
    assert_eq!(code, 0);
    assert_eq!(report["extra_invariance"]["delta_invariant"], true);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.json",
        &z12(json!({ "subspace": { "random": 2 }, "data": { "random": 2 }, "options": { "ell": 1, "seed": 5 } })),
    );
    for cmd in ["check", "approx", "validate"] {
        let a = bin().arg(cmd).arg("--config").arg(&cfg).output().unwrap();
        let b = bin().arg(cmd).arg("--config").arg(&cfg).output().unwrap();
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z.json", &z12(json!({})));
    let out = dir.path().join("report.json");
    let status = bin().args(["partition", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["command"], "partition");
}

#[test]
fn demos_pass() {
    for name in ["shear", "dilation", "canonical"] {
        let out = bin().args(["demo", name]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}");
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["pass"], true, "{name}");
    }
}
