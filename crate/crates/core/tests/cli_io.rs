//! End-to-end binary tests: exit codes, file handling, and output
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slabmodes"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slabmodes-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, body).expect("config written");
    path
}

fn run_with_config(body: &str, name: &str, extra: &[&str]) -> Output {
    let config = write_config(name, body);
    bin()
        .arg("--config")
        .arg(&config)
        .args(extra)
        .output()
        .expect("binary runs")
}

const SPECTRUM_CONFIG: &str = r#"{
    "command": "spectrum",
    "variant": {"family": "one-phase", "index": 1},
    "angles_pi": [0.0],
    "mass": 1.0,
    "field": 1.0,
    "parameterization": {"type": "landau_level", "n": 0},
    "a_slab": 1.0,
    "k_window": [0.0, 10.0]
}"#;

#[test]
fn spectrum_stdout_merges_both_branches() {
    let out = run_with_config(SPECTRUM_CONFIG, "spectrum.json", &[]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).expect("utf8");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "branch,root_index,k,epsilon,re_root,im_root,residual");
    assert_eq!(lines.len(), 7, "six momenta in (0, 10]");
    let k1: f64 = lines[1].split(',').nth(2).expect("k").parse().expect("parses");
    assert!((k1 - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn identical_config_and_seed_reproduce_bytes() {
    let config = write_config("determinism.json", SPECTRUM_CONFIG);
    let out_a = scratch("spectrum_a.csv");
    let out_b = scratch("spectrum_b.csv");
    for (path, _) in [(&out_a, 0), (&out_b, 1)] {
        let out = bin()
            .arg("--config")
            .arg(&config)
            .arg("--output")
            .arg(path)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
    }
    let a = std::fs::read(&out_a).expect("first output");
    let b = std::fs::read(&out_b).expect("second output");
    assert!(!a.is_empty());
    assert_eq!(a, b);

    let oracle = r#"{"command": "oracle-check", "variant": {"family": "one-phase", "index": 4}}"#;
    let run = |n: &str| {
        let out = run_with_config(oracle, n, &["--seed", "9", "--draws", "25"]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    assert_eq!(run("oracle_a.json"), run("oracle_b.json"));
}

#[test]
fn malformed_json_exits_2_and_writes_nothing() {
    let config = write_config("broken.json", "{\"command\": ");
    let out_path = scratch("never_written.csv");
    let out = bin()
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(&out_path)
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}

#[test]
fn unknown_key_exits_2() {
    let body = SPECTRUM_CONFIG.replacen("\"command\"", "\"surprise\": 1, \"command\"", 1);
    let out = run_with_config(&body, "unknown_key.json", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn subcritical_energy_exits_3() {
    let body = SPECTRUM_CONFIG.replace(
        "{\"type\": \"landau_level\", \"n\": 0}",
        "{\"type\": \"fixed_epsilon\", \"epsilon\": 0.5}",
    );
    let out = run_with_config(&body, "subcritical.json", &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("energy") || err.contains("mass"), "stderr: {err}");
}

#[test]
fn missing_config_file_exits_2() {
    let out = bin()
        .arg("--config")
        .arg(scratch("does_not_exist.json"))
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_flag_exits_2() {
    let out = bin().output().expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let config = write_config("io_fail.json", SPECTRUM_CONFIG);
    let out = bin()
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(scratch("missing_dir").join("out.csv"))
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_format_flag_overrides_default() {
    let out = run_with_config(SPECTRUM_CONFIG, "json_format.json", &["--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> =
        serde_json::from_slice(&out.stdout).expect("stdout is a JSON array");
    assert_eq!(rows.len(), 6);
    assert!(rows[0]["residual"].as_f64().expect("residual") < 1e-9);
}
