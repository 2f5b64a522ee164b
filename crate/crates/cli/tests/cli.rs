use std::path::Path;
use std::process::{Command, Output};

fn fcqem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcqem")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

/// Data rows of a CSV table: everything after the `#` metadata and the header.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn ground_state_of_open_chain() {
    let v = json(&fcqem(&["ground-state", "--model", "tfim", "--n", "10", "--j", "1"]));
    assert!((v["energy"].as_f64().unwrap() + 9.0).abs() < 1e-9);
    assert_eq!(v["terms"], 9);
}

#[test]
fn field_sweep_has_one_row_per_point() {
    let args = [
        "sweep", "--model", "tfim", "--n", "10", "--j", "1", "--h-range", "0:1:0.125", "--trial", "neel", "--noise",
        "readout=0.03", "--shots", "100000", "--seed", "7",
    ];
    let first = stdout(&fcqem(&args));
    let r = rows(&first);
    assert_eq!(r.len(), 9);
    assert_eq!(r[0][0], "0");
    assert_eq!(r[8][0], "1");
    assert!(first.contains("# seed: 7"));
    assert!(first.contains("# version: "));
    assert!(first.lines().any(|l| l.starts_with("# config: {")));
    // h = 0: the exact column is the bond count.
    assert_eq!(r[0][5].parse::<f64>().unwrap(), -9.0);
    assert_eq!(stdout(&fcqem(&args)), first, "same config, same bytes");
}

#[test]
fn empty_range_gives_header_only() {
    let out = stdout(&fcqem(&["sweep", "--model", "tfim", "--n", "4", "--h-range", "1:0:0.1", "--trial", "neel"]));
    assert!(rows(&out).is_empty());
    assert!(out.lines().any(|l| l.starts_with("param,raw,fcqem")));
}

#[test]
fn angle_sweep_over_a_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "ZI -1.0\nIZ -0.5\nXX 0.3\n");
    let c = write(dir.path(), "c.txt", "QUBITS 2\nRY 0 0.2\n");
    let out = stdout(&fcqem(&[
        "sweep", "--hamiltonian", &h, "--trial", &c, "--rotate-y", "q=1", "--theta-range", "0:pi:0.25pi",
        "--noise", "depol-global=0", "--shots", "0",
    ]));
    assert_eq!(rows(&out).len(), 5);
}

fn measurement_file(dir: &Path, name: &str, bases: &[(&str, &str)]) -> String {
    let records: Vec<String> = bases
        .iter()
        .map(|(b, counts)| format!(r#"{{"basis": "{b}", "shots": 100, "counts": {counts}}}"#))
        .collect();
    write(dir, name, &format!(r#"{{"num_qubits": 2, "records": [{}]}}"#, records.join(",")))
}

#[test]
fn mitigate_reports_all_modes() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "ZZ 1.0\nXX 0.5\nZI -0.25\n");
    let m = measurement_file(
        dir.path(),
        "m.json",
        &[("ZZ", r#"{"00": 70, "01": 5, "10": 10, "11": 15}"#), ("XX", r#"{"00": 60, "11": 30, "01": 10}"#)],
    );
    let v = json(&fcqem(&["mitigate", "--measurements", &m, "--hamiltonian", &h, "--second", &m]));
    let per_basis = v["fcqem_per_basis"].as_f64().unwrap();
    let two_copy = v["two_copy"].as_f64().unwrap();
    assert!((per_basis - two_copy).abs() < 1e-12, "{per_basis} vs {two_copy}");
    assert!(v["raw"].as_f64().is_some());
    assert!(v["fcqem_global_z"].as_f64().is_some());
    assert!(v["qcm"].is_object());
    assert!(v.get("version").is_some() && v.get("config").is_some());
}

#[test]
fn delta_data_is_left_alone() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "ZZ 1.0\nZI -0.25\n");
    let m = measurement_file(dir.path(), "m.json", &[("ZZ", r#"{"01": 100}"#)]);
    let v = json(&fcqem(&["mitigate", "--measurements", &m, "--hamiltonian", &h]));
    let raw = v["raw"].as_f64().unwrap();
    assert_eq!(raw, -1.25);
    assert_eq!(v["fcqem_per_basis"].as_f64().unwrap(), raw);
}

#[test]
fn missing_bases_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "ZZ 1.0\nXX 0.5\n");
    let m = measurement_file(dir.path(), "m.json", &[("ZZ", r#"{"00": 100}"#)]);
    let o = fcqem(&["mitigate", "--measurements", &m, "--hamiltonian", &h]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("XX"));
}

#[test]
fn scale_without_noise_is_exact() {
    let out = stdout(&fcqem(&["scale", "--sizes", "16,18", "--rates", "0", "--shots", "1000", "--seed", "2"]));
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    for row in &r {
        assert_eq!(row[3], row[4], "raw equals corrected");
        assert_eq!(row[3].parse::<f64>().unwrap().abs(), 1.0);
    }
}

#[test]
fn dump_dist_thresholds() {
    let out = stdout(&fcqem(&["dump-dist", "--trial", "neel", "--n", "4"]));
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][0], "0101");
    assert_eq!(r[1][0], "1010");
    for row in &r {
        assert!((row[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    }
    let all = stdout(&fcqem(&["dump-dist", "--trial", "neel", "--n", "4", "--threshold", "0"]));
    assert_eq!(rows(&all).len(), 16);

    let noisy = stdout(&fcqem(&["dump-dist", "--trial", "neel", "--n", "4", "--noise", "readout=0.03", "--threshold", "0"]));
    let small: Vec<_> = rows(&noisy)
        .into_iter()
        .filter(|r| r[0] != "0101" && r[0] != "1010")
        .map(|r| (r[1].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap()))
        .collect();
    assert!(small.iter().all(|(raw, corr)| corr < raw));
}

#[test]
fn exit_codes_by_failure_class() {
    // Configuration: no Hamiltonian source.
    assert_eq!(fcqem(&["ground-state"]).status.code(), Some(2));
    assert_eq!(fcqem(&["sweep", "--model", "tfim", "--n", "4", "--rotate-y", "0"]).status.code(), Some(2));
    // Input: malformed Hamiltonian file.
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "ZZ 1\nZQ 2\n");
    let o = fcqem(&["ground-state", "--hamiltonian", &h]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    // Capacity: too many qubits for exact diagonalization.
    assert_eq!(fcqem(&["ground-state", "--model", "tfim", "--n", "30"]).status.code(), Some(4));
    // Non-Clifford trial in the frame sampler.
    let c = write(dir.path(), "c.txt", "QUBITS 2\nRY 0 0.1\n");
    assert_ne!(fcqem(&["scale", "--trial", &c, "--rates", "0.01", "--shots", "10"]).status.code(), Some(0));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"model": "tfim", "n": 6, "h": 0.5}"#);
    let from_file = json(&fcqem(&["--config", &cfg, "ground-state"]));
    let direct = json(&fcqem(&["ground-state", "--model", "tfim", "--n", "6", "--h", "0.5"]));
    assert_eq!(from_file["energy"], direct["energy"]);
    let overridden = json(&fcqem(&["--config", &cfg, "ground-state", "--n", "4"]));
    assert_eq!(overridden["num_qubits"], 4);
    let bad = write(dir.path(), "bad.json", r#"{"modle": "tfim"}"#);
    assert_eq!(fcqem(&["--config", &bad, "ground-state"]).status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let args = ["dump-dist", "--trial", "neel", "--n", "4", "--noise", "readout=0.1", "--shots", "500", "--seed", "4"];
    let printed = stdout(&fcqem(&args));
    let mut with_file = args.to_vec();
    with_file.extend(["--output", out.to_str().unwrap()]);
    stdout(&fcqem(&with_file));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>(),
        printed.lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>());
}
