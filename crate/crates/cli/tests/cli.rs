//! End-to-end tests of the command-line interface: output contracts,
//! byte-level determinism, and the exit-code taxonomy.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac1d"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn desk_config(n_z: usize, r_p: i64, r_q: i64, f_field: &str) -> String {
    format!(
        r#"{{
  "domain": {{ "L": 6.283185307179586, "n_z": {n_z}, "r_max": 16 }},
  "state": {{
    "terms": [
      {{ "amplitude": [1.0, 0.0], "electrons": [{r_p}], "positrons": [] }},
      {{ "amplitude": [1.0, 0.0], "electrons": [{r_q}], "positrons": [] }}
    ]
  }},
  "potential": {{ "kind": "feedback", "f": {f_field}, "t_f": 1.0, "n_t": 256 }},
  "q_charge": 1.0
}}
"#
    )
}

#[test]
fn current_profile_matches_interference_form() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "run.json", &desk_config(64, 2, 1, "1.0"));
    let out_csv = dir.path().join("current.csv");

    let output = run(&[
        "current",
        "--config",
        &config,
        "--t",
        "0.5",
        "--out-csv",
        out_csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let text = fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "z,J0,dJ0_dz");
    let length = 2.0 * PI;
    let amplitude = 1.0 / length;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (z, j0, grad) = (fields[0], fields[1], fields[2]);
        let expect = amplitude * (1.0 + (z - 0.5).cos());
        assert!((j0 - expect).abs() <= 1e-12, "J0 at z = {z}");
        let expect_grad = -amplitude * (z - 0.5).sin();
        assert!((grad - expect_grad).abs() <= 1e-12, "gradient at z = {z}");
    }
}

#[test]
fn vacuum_current_is_identically_zero() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "vacuum.json",
        r#"{
  "domain": { "L": 6.283185307179586, "n_z": 32, "r_max": 8 },
  "state": { "terms": [ { "amplitude": [1.0, 0.0], "electrons": [], "positrons": [] } ] },
  "potential": { "kind": "feedback", "f": 1.0, "t_f": 1.0, "n_t": 64 },
  "q_charge": 1.0
}
"#,
    );
    let output = run(&["current", "--config", &config]);
    assert!(output.status.success());
    for line in String::from_utf8_lossy(&output.stdout).lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(fields[1], 0.0);
        assert_eq!(fields[2], 0.0);
    }
}

#[test]
fn extract_reports_energy_below_vacuum_at_large_coupling() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "run.json", &desk_config(256, 2, 1, "100.0"));
    let out_json = dir.path().join("report.json");
    let out_csv = dir.path().join("report.csv");

    let output = run(&[
        "extract",
        "--config",
        &config,
        "--out-json",
        out_json.to_str().unwrap(),
        "--out-csv",
        out_csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_json).unwrap()).unwrap();
    let xi0_final = report["quadrature"]["xi0_final"].as_f64().unwrap();
    let expect = 1.5 - 100.0 / (4.0 * PI);
    assert!(xi0_final < 0.0, "final energy must drop below the vacuum");
    assert!((xi0_final - expect).abs() <= 1e-9);
    assert!(report["estimators_agree"].as_bool().unwrap());
    assert!(report["rel_disagreement"].as_f64().unwrap() <= 1e-6);

    let csv = fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "f,delta_quadrature,delta_direct,delta_closed_form,xi0_initial,xi0_final,rel_disagreement"
    );
    assert_eq!(lines.len(), 2);
}

#[test]
fn extract_with_zero_coupling_is_null() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "run.json", &desk_config(64, 2, 1, "0.0"));
    let output = run(&["extract", "--config", &config]);
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["quadrature"]["delta"].as_f64().unwrap(), 0.0);
    assert_eq!(report["direct"]["delta"].as_f64().unwrap(), 0.0);
    assert_eq!(report["rel_disagreement"].as_f64().unwrap(), 0.0);
}

#[test]
fn flag_overrides_take_precedence() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "run.json", &desk_config(64, 2, 1, "1.0"));
    let output = run(&["extract", "--config", &config, "--f", "10.0"]);
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["coupling"].as_f64().unwrap(), 10.0);
    let delta = report["quadrature"]["delta"].as_f64().unwrap();
    assert!((delta - (-10.0 / (4.0 * PI))).abs() <= 1e-9);
}

#[test]
fn sweep_rows_decrease_and_outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "run.json",
        &desk_config(128, 2, 1, "[1.0, 10.0, 100.0, 1000.0]"),
    );
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    for target in [&csv_a, &csv_b] {
        let output = run(&[
            "sweep",
            "--config",
            &config,
            "--out-csv",
            target.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let bytes_a = fs::read(&csv_a).unwrap();
    let bytes_b = fs::read(&csv_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "repeat runs must be byte identical");

    // The JSON report is byte-stable too.
    let json_a = run(&["extract", "--config", &config, "--f", "3.0"]);
    let json_b = run(&["extract", "--config", &config, "--f", "3.0"]);
    assert!(json_a.status.success() && json_b.status.success());
    assert_eq!(json_a.stdout, json_b.stdout);

    let text = String::from_utf8(bytes_a).unwrap();
    assert!(!text.contains('\r'), "LF line endings only");
    let deltas: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(deltas.len(), 4);
    for pair in deltas.windows(2) {
        assert!(pair[1] < pair[0], "delta strictly decreasing in f");
    }
}

#[test]
fn tabulated_potential_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    // Static cosine on a 64 x 65 grid over the window.
    let n_z = 64usize;
    let n_t = 64usize;
    let mut table = String::from("z_index,t_index,V\n");
    for ti in 0..=n_t {
        for zi in 0..n_z {
            let z = -PI + 2.0 * PI * zi as f64 / n_z as f64;
            table.push_str(&format!("{zi},{ti},{:.17e}\n", z.cos()));
        }
    }
    fs::write(dir.path().join("table.csv"), &table).unwrap();
    let config = write_config(
        dir.path(),
        "run.json",
        r#"{
  "domain": { "L": 6.283185307179586, "n_z": 64, "r_max": 16 },
  "state": {
    "terms": [
      { "amplitude": [1.0, 0.0], "electrons": [2], "positrons": [] },
      { "amplitude": [1.0, 0.0], "electrons": [1], "positrons": [] }
    ]
  },
  "potential": { "kind": "tabulated", "table_path": "table.csv", "t_f": 1.0, "n_t": 64 },
  "q_charge": 1.0
}
"#,
    );
    let output = run(&["extract", "--config", &config]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    // No feedback coupling and no closed form for tabulated runs.
    assert!(report["coupling"].is_null());
    assert!(report["closed_form"].is_null());
    assert!(report["quadrature"]["delta"].as_f64().unwrap().abs() > 1e-6);
}

#[test]
fn schema_violations_exit_2() {
    let dir = TempDir::new().unwrap();
    // Unknown key.
    let config = write_config(
        dir.path(),
        "bad1.json",
        r#"{
  "domain": { "L": 6.283185307179586, "n_z": 64, "r_max": 16, "extra": 1 },
  "state": { "terms": [ { "amplitude": [1.0, 0.0], "electrons": [1], "positrons": [] } ] },
  "potential": { "kind": "feedback", "f": 1.0, "t_f": 1.0, "n_t": 64 },
  "q_charge": 1.0
}
"#,
    );
    let output = run(&["extract", "--config", &config]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("schema"));

    // Unknown potential kind.
    let config = write_config(
        dir.path(),
        "bad2.json",
        r#"{
  "domain": { "L": 6.283185307179586, "n_z": 64, "r_max": 16 },
  "state": { "terms": [ { "amplitude": [1.0, 0.0], "electrons": [1], "positrons": [] } ] },
  "potential": { "kind": "gaussian", "f": 1.0, "t_f": 1.0, "n_t": 64 },
  "q_charge": 1.0
}
"#,
    );
    assert_eq!(run(&["extract", "--config", &config]).status.code(), Some(2));

    // Missing config file.
    let missing = dir.path().join("nope.json");
    let output = run(&["extract", "--config", missing.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));

    // Empty sweep list.
    let config = write_config(dir.path(), "bad3.json", &desk_config(64, 2, 1, "[]"));
    let output = run(&["sweep", "--config", &config]);
    assert_eq!(output.status.code(), Some(2));

    // Extract with a coupling list.
    let config = write_config(dir.path(), "bad4.json", &desk_config(64, 2, 1, "[1.0, 2.0]"));
    let output = run(&["extract", "--config", &config]);
    assert_eq!(output.status.code(), Some(2));

    // Mode outside the cutoff.
    let config = write_config(dir.path(), "bad5.json", &desk_config(64, 99, 1, "1.0"));
    let output = run(&["extract", "--config", &config]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn resolution_guard_exits_3() {
    let dir = TempDir::new().unwrap();
    // Harmonic spread 5 needs n_z > 10; n_z = 8 must refuse.
    let config = write_config(dir.path(), "run.json", &desk_config(8, 6, 1, "1.0"));
    let output = run(&["extract", "--config", &config]);
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&output.stderr).contains("resolution"));
}

#[test]
fn verify_passes_on_a_healthy_build() {
    let output = run(&["verify"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("gating checks passed"));
    assert!(!stdout.contains("FAIL"));
    // One line per check plus the summary.
    assert!(stdout.lines().count() >= 20);
}
