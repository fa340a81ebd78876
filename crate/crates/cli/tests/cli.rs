use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pauli-dilate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn reals(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn csv(o: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn channel_reports() {
    let o = run(&["channel", "--in", r#"{"type":"phase_damping","p":0.3}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(reals(&v["lambda"]), vec![0.4, 0.4, 1.0]);
    assert_eq!(v["kraus_rank"], 2);

    let v = json(&run(&["channel", "--in", r#"{"type":"pauli","p":[1,0,0,0]}"#]));
    assert_eq!(v["kraus_rank"], 1);
    assert_eq!(reals(&v["lambda"]), vec![1.0, 1.0, 1.0]);
    assert_eq!(reals(&v["choi_eigenvalues"]), vec![0.0, 0.0, 0.0, 2.0]);

    let v = json(&run(&["channel", "--in", r#"{"type":"depolarizing","p":0.75}"#]));
    assert_eq!(reals(&v["lambda"]), vec![0.0, 0.0, 0.0]);
}

#[test]
fn malformed_descriptors_exit_one() {
    for input in [r#"{"type":"phase_damping"}"#, r#"{"type":"pauli","p":[0.5,0.6,0,0]}"#, "{not json"] {
        let o = run(&["channel", "--in", input]);
        assert_eq!(o.status.code(), Some(1), "{input}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["channel"]).status.code(), Some(1));
}

#[test]
fn unknown_command_exits_one() {
    let o = run(&["bogus", "--in", "{}"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn rep_tables() {
    let v = json(&run(&["rep", "--in", r#"{"type":"phase_damping","p":0.3}"#]));
    assert_eq!(v["dim_e"], 2);
    for el in v["elements"].as_array().unwrap() {
        let label = el["label"].as_str().unwrap();
        let diag: Vec<f64> = (0..2).map(|i| el["matrix"][i][i][0].as_f64().unwrap()).collect();
        let expected = if label.ends_with('X') || label.ends_with('Y') { [1.0, -1.0] } else { [1.0, 1.0] };
        for (a, b) in diag.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10, "{label}");
        }
    }
    assert!(v["su2"].is_null());

    let dep = json(&run(&["rep", "--in", r#"{"type":"depolarizing","p":0.3}"#]));
    let jx = &dep["su2"]["jx"];
    assert!((jx[2][3][1].as_f64().unwrap() + 2.0).abs() < 1e-10);
    assert!((jx[3][2][1].as_f64().unwrap() - 2.0).abs() < 1e-10);

    let generic = json(&run(&["rep", "--in", r#"{"type":"pauli","p":[0.4,0.3,0.2,0.1]}"#]));
    for (a, b) in generic["elements"].as_array().unwrap().iter().zip(dep["elements"].as_array().unwrap()) {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..2 {
                    let x = a["matrix"][i][j][k].as_f64().unwrap();
                    let y = b["matrix"][i][j][k].as_f64().unwrap();
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn commutant_listing() {
    let v = json(&run(&["commutant", "--in", r#"{"generators":["ZZZ","XZI","YIZ"],"qubits":3}"#]));
    assert_eq!(v["count"], 16);
}

#[test]
fn evolve_curves() {
    let o = run(&["evolve", "--in", r#"{"builder":"phase_damping"}"#, "--tmax", &PI.to_string(), "--samples", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&o);
    assert_eq!(header, ["t", "pI", "px", "py", "pz", "leakage"]);
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!((r[4] - 0.5 * (1.0 - (2.0 * r[0]).cos())).abs() < 1e-10);
        assert!(r[5] < 1e-10);
    }

    let (_, rows) = csv(&run(&["evolve", "--in", r#"{"builder":"depolarizing"}"#]));
    assert_eq!(rows.len(), 25);
    for r in &rows {
        let p = 0.5 * (1.0 - (2.0 * 3f64.sqrt() * r[0]).cos());
        assert!((r[2] + r[3] + r[4] - p).abs() < 1e-10);
    }

    let (_, rows) = csv(&run(&["evolve", "--in", r#"{"hamiltonian":[],"psiE":"1"}"#, "--samples", "4"]));
    for r in &rows {
        assert_eq!(&r[1..], &[1.0, 0.0, 0.0, 0.0, 0.0]);
    }
}

#[test]
fn strict_mode_flags_leakage() {
    // Amplitude-damping-like coupling leaves the Pauli family.
    let desc = r#"{"hamiltonian":[["XX",0.5],["YY",0.5]],"psiE":"0"}"#;
    assert_eq!(run(&["evolve", "--in", desc, "--samples", "5"]).status.code(), Some(0));
    let o = run(&["evolve", "--in", desc, "--samples", "5", "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stdout.is_empty());
}

#[test]
fn collide_tables() {
    let o = run(&["collide", "--in", r#"{"a":[1,1,1],"zeta":1,"dt":0.1,"n":10}"#]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&o);
    assert_eq!(header, ["dt", "t", "trace_distance"]);
    assert_eq!(rows.len(), 11 + 21 + 41 + 81);
    let summary = String::from_utf8(o.stderr).unwrap();
    assert!(summary.starts_with("dt,max_error,ratio"));
    assert_eq!(summary.lines().count(), 5);

    let o = run(&["collide", "--in", r#"{"a":[0,0,1],"zeta":1,"dt":0.1,"n":0}"#]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let desc = dir.path().join("desc.json");
    std::fs::write(&desc, r#"{"a":[0,0,1],"zeta":1,"dt":0.1,"n":10}"#).unwrap();
    for out in [&a, &b] {
        let o = run(&["collide", "--in", desc.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let first = std::fs::read(&a).unwrap();
    assert!(!first.is_empty());
    assert_eq!(first, std::fs::read(&b).unwrap());

    let v1 = run(&["verify", "--seed", "7"]);
    let v2 = run(&["verify", "--seed", "7"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn verify_suite() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() > 20);
    assert!(!text.contains("FAIL"));

    let ok = run(&["verify", "--in", r#"{"builder":"generic","a":[0.5,-0.3,0.6]}"#]);
    assert_eq!(ok.status.code(), Some(0));

    let perturbed = r#"{"hamiltonian":[["XIX",1],["YXI",1],["ZXX",1],["XII",0.1]],"psiE":"11"}"#;
    let o = run(&["verify", "--in", perturbed]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL input: H in Pauli commutant"));

    let shifted = r#"{"hamiltonian":[["XIX",1],["YXI",1],["ZXX",1]],"psiE":"10"}"#;
    let o = run(&["verify", "--in", shifted]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL input: pi_E(g) psiE = psiE"));
}
