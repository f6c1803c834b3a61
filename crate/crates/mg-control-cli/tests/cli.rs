//! End-to-end checks of the binary: output artifacts and exit statuses.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mgcontrol"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mgcontrol-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const CONFIG: &str = r#"{
    "schema": 1,
    "params": {"mu": 1.0, "p": 2.0, "n": 9.65},
    "segments": [
        {"t_start": 0.0, "law": {"type": "none"}, "tau": 3.0},
        {"t_start": 20.0, "law": {"type": "constant", "k": 0.39}, "tau": 3.0}
    ],
    "phi": {"family": "sinusoid", "a": 2.0, "b": 0.02, "c": 1.0},
    "horizon": 60.0
}"#;

#[test]
fn analyze_reports_case_and_conditions() {
    let out = bin()
        .args([
            "analyze", "--mu", "1", "--p", "2", "--n", "9.65", "--tau", "2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case: C"));
    assert!(text.contains("condition (L): fails"));
    assert!(text.contains("condition (T) at tau=2: fails"));

    let out = bin()
        .args(["analyze", "--mu", "2", "--p", "1", "--n", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case: A"));
    assert!(text.contains("not applicable"));
}

#[test]
fn analyze_rejects_bad_params_with_status_2() {
    let out = bin()
        .args(["analyze", "--mu", "0", "--p", "2", "--n", "9.65"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_prints_thresholds() {
    let out = bin()
        .args(["design", "pyragas", "--mu", "1", "--p", "2", "--n", "9.65"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("k_py"));
    assert!(text.contains("3.8768"));

    // Case B parameters cannot be designed against.
    let out = bin()
        .args([
            "design", "constant", "--mu", "1", "--p", "1.02", "--n", "30",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // sdd needs --tau.
    let out = bin()
        .args(["design", "sdd", "--mu", "1", "--p", "2", "--n", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_svg_report() {
    let dir = temp_dir("simulate");
    let cfg_path = dir.join("run.json");
    fs::write(&cfg_path, CONFIG).unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(&cfg_path)
        .args(["--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("run.csv")).unwrap();
    assert!(csv.starts_with("t,x,k_active,tau_active\n"));
    assert!(csv.lines().count() > 1000);
    let svg = fs::read_to_string(dir.join("run.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("run.report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["config"]["horizon"], 60.0);
    assert_eq!(report["segments"].as_array().unwrap().len(), 2);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn simulate_no_svg_skips_plot() {
    let dir = temp_dir("nosvg");
    let cfg_path = dir.join("run.json");
    fs::write(&cfg_path, CONFIG).unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(&cfg_path)
        .args(["--no-svg", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!dir.join("run.svg").exists());
    assert!(dir.join("run.csv").exists());
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn simulate_missing_config_is_status_2() {
    let out = bin()
        .args(["simulate", "/nonexistent/nowhere.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_invalid_config_is_status_2() {
    let dir = temp_dir("invalid");
    let cfg_path = dir.join("bad.json");
    fs::write(&cfg_path, CONFIG.replace("\"schema\": 1", "\"schema\": 99")).unwrap();
    let out = bin().args(["simulate"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    fs::write(
        &cfg_path,
        CONFIG.replace("\"horizon\": 60.0", "\"horizon\": 60.0, \"bogus\": 1"),
    )
    .unwrap();
    let out = bin().args(["simulate"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn reproduce_unknown_figure_is_status_2() {
    let out = bin().args(["reproduce", "fig9-up"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_single_preset_matches() {
    let dir = temp_dir("reproduce");
    let out = bin()
        .args(["reproduce", "fig1-left", "--no-svg", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fig1-left"));
    assert!(text.contains("ok"));
    assert!(!text.contains("MISMATCH"));
    assert!(dir.join("fig1-left.csv").exists());
    assert!(dir.join("fig1-left.report.json").exists());
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn emitted_csv_reloads_bit_exactly() {
    let dir = temp_dir("roundtrip");
    let cfg_path = dir.join("run.json");
    fs::write(&cfg_path, CONFIG).unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(&cfg_path)
        .args(["--no-svg", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(dir.join("run.csv")).unwrap();
    let rows = mg_control::io::read_csv(text.as_bytes()).unwrap();
    // Writing the parsed rows back reproduces the file byte-for-byte.
    let mut rewritten = String::from("t,x,k_active,tau_active\n");
    for r in &rows {
        rewritten.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.t, r.x, r.k_active, r.tau_active
        ));
    }
    assert_eq!(text, rewritten);
    let _ = fs::remove_dir_all(&dir);
}
