use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn squidgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squidgate")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn json_of(args: &[&str]) -> (Value, String) {
    let o = squidgate(args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    (serde_json::from_str(&text).unwrap(), text)
}

fn device_json(delta: [f64; 3]) -> String {
    format!(
        r#"{{"units":"s^-1","g":[3e9,3e9,3e9],"delta":[{},{},{}],"omega_02":[3e10,3e10,3e10],"omega_12":[3e10,3e10,3e10],"omega_13":[3e10,3e10,3e10],"omega_03":[3e10,3e10,3e10]}}"#,
        delta[0], delta[1], delta[2]
    )
}

#[test]
fn three_qubit_defaults() {
    let (v, _) = json_of(&["gate", "three-qubit", "--format", "json"]);
    let rows = v["truth_table"]["rows"].as_array().unwrap();
    let expected = [0.0, 0.0, 0.0, 0.0, 0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
    assert_eq!(rows.len(), 8);
    for (row, e) in rows.iter().zip(expected) {
        assert!((row["phase"].as_f64().unwrap() - e).abs() < 1e-10, "{row}");
        assert!((row["vacuum_population"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert!(row["leakage"].as_f64().unwrap() < 1e-10);
    }
    assert!(v["fidelity"]["fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
    assert_eq!(v["truth_table"]["mode"], "analytic");

    let text = stdout(&squidgate(&["gate", "three-qubit"]));
    assert!(text.contains("fidelity        1.000000000000"), "{text}");
}

#[test]
fn merged_three_qubit_takes_the_closed_form_time() {
    let (v, _) = json_of(&["gate", "three-qubit", "--merged", "--format", "json"]);
    let g = 3e9;
    let tau = PI / (10.0 * g) + PI / g + 1.5 * PI / (10.0 * g) + (FRAC_PI_2 + FRAC_PI_4) * 10.0 / g;
    assert!((v["duration_s"].as_f64().unwrap() - tau).abs() < 1e-12 * tau);
}

#[test]
fn ntcp_with_mismatched_detunings_names_the_squid() {
    let path = tmp("ntcp_mismatch.json");
    std::fs::write(&path, device_json([3e10, 3e10, 4.5e10])).unwrap();
    let o = squidgate(&["gate", "ntcp", "--n", "3", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("SQUID 3"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());

    std::fs::write(&path, device_json([3e10; 3])).unwrap();
    let o = squidgate(&["gate", "ntcp", "--n", "3", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn two_qubit_pi_is_cz() {
    let o = squidgate(&["gate", "two-qubit", "--theta", "pi", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "input,phase,ideal_phase,return_population,leakage,vacuum_population,flagged");
    assert_eq!(lines.len(), 5);
    for (line, want) in lines[1..].iter().zip([0.0, 0.0, 0.0, PI]) {
        let f: Vec<&str> = line.split(',').collect();
        assert!((f[1].parse::<f64>().unwrap() - want).abs() < 1e-10, "{line}");
        assert!((f[2].parse::<f64>().unwrap() - want).abs() < 1e-12, "{line}");
        assert!(!f[2].starts_with('-'));
    }
}

#[test]
fn angle_expressions_reach_the_gate() {
    let (v, _) = json_of(&["gate", "n-qubit", "--theta", "3*pi/4,3pi/8", "--format", "json"]);
    let rows = v["truth_table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!((rows[7]["phase"].as_f64().unwrap() - 9.0 * PI / 8.0).abs() < 1e-10);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["gate", "three-qubit", "--theta", "pi/2"][..],
        &["gate", "three-qubit", "--n", "4"],
        &["gate", "n-qubit", "--theta", "pi/2,half"],
        &["gate", "ntcp", "--theta", "pi"],
        &["gate", "multiphase", "--merged"],
        &["gate", "bogus"],
        &["gate", "three-qubit", "--cavity-dim", "1"],
        &["timing", "--n", "21"],
        &["gate", "three-qubit", "--config", "/nonexistent/params.json"],
        &["dispersive-check", "--g", "-1"],
    ] {
        let o = squidgate(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn qft_reports_reversed_input_order() {
    let (v, _) = json_of(&["qft", "--format", "json"]);
    assert_eq!(v["qft"]["permutation"], "reverse-input");
    assert!(v["qft"]["fidelity_vs_dft"].as_f64().unwrap() > 1.0 - 1e-9);
    assert!(v["fidelity"]["leakage"].as_f64().unwrap() < 1e-10);
}

#[test]
fn timing_csv_rows() {
    let o = squidgate(&["timing", "--n", "6", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,tau_multi_ns,tau_decomposed_ns"));
    let g = 3e9;
    let mut last_gap = -1.0;
    for (line, n) in lines.zip(2..) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[0] as i32, n);
        // π/Ω13 + π/g + nπ/(2Ω02) + Σ θ_k Δ/g² with θ_k = π/2^(k-1)
        let nf = n as f64;
        let disp: f64 = (2..=n).map(|k| PI / 2f64.powi(k - 1) * 10.0 / g).sum();
        let multi = (PI / (10.0 * g) + PI / g + nf * PI / (20.0 * g) + disp) * 1e9;
        let p = 2f64.powi(n - 1);
        let dec = PI / g * (6.0 * (nf - 1.0) / 5.0 + 10.0 * (p - 1.0) / p) * 1e9;
        assert!((f[1] - multi).abs() < 2e-6, "{line}");
        assert!((f[2] - dec).abs() < 2e-6, "{line}");
        let gap = f[2] - f[1];
        assert!(gap > last_gap);
        last_gap = gap;
    }
}

#[test]
fn dispersive_check_at_ten_g() {
    let (v, _) = json_of(&["dispersive-check", "--format", "json"]);
    assert!((v["p3_exact"].as_f64().unwrap() - 1.0 / 26.0).abs() < 1e-6);
    let text = stdout(&squidgate(&["dispersive-check", "--delta", "3e11"]));
    assert!(text.contains("(100.000 g)"), "{text}");
}

#[test]
fn levels_sweep_csv() {
    let o = squidgate(&["levels", "--points", "3", "--sweep-to", "0.2", "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "phi_x_over_phi0,omega01,omega12,omega23");
    assert_eq!(lines.len(), 4);
    let w01: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    // biasing away from zero flattens the well
    assert!(w01[0] > w01[1] && w01[1] > w01[2]);
}

#[test]
fn levels_from_config_file() {
    let path = tmp("harmonic_circuit.json");
    std::fs::write(&path, r#"{"capacitance":1e-12,"inductance":1e-10,"critical_current":0.0,"phi_x":0.0}"#).unwrap();
    let (v, _) = json_of(&["levels", "--config", path.to_str().unwrap(), "--format", "json"]);
    let w = v["transition_frequencies"][0][1].as_f64().unwrap();
    assert!((w / 1e11 - 1.0).abs() < 1e-6);
}

#[test]
fn json_output_reserializes_byte_for_byte() {
    for args in [
        &["gate", "three-qubit", "--format", "json"][..],
        &["gate", "three-qubit", "--mode", "exact-dispersive", "--format", "json"],
        &["qft", "--format", "json"],
        &["timing", "--n", "5", "--format", "json"],
        &["dispersive-check", "--format", "json"],
        &["levels", "--format", "json"],
    ] {
        let (v, text) = json_of(args);
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn exact_mode_reports_without_failing() {
    let (v, _) = json_of(&["gate", "three-qubit", "--mode", "exact-dispersive", "--format", "json"]);
    let f = v["fidelity"]["fidelity"].as_f64().unwrap();
    assert!(f < 1.0 - 1e-6 && f > 0.9, "{f}");
    assert_eq!(v["truth_table"]["mode"], "exact-dispersive");
}

#[test]
fn out_flag_writes_the_same_report() {
    let path = tmp("timing.csv");
    let o = squidgate(&["timing", "--n", "4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let direct = stdout(&squidgate(&["timing", "--n", "4", "--format", "csv"]));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn shipped_configs_load() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let o = squidgate(&["gate", "three-qubit", "--config", &format!("{root}/default_params.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = squidgate(&["gate", "multiphase", "--config", &format!("{root}/multiphase_params.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = squidgate(&["levels", "--config", &format!("{root}/flux_circuit.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}
