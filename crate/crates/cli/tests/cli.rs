//! Black-box tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn retune() -> Command {
    Command::new(env!("CARGO_BIN_EXE_retune"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn qft2_qasm() -> &'static str {
    r#"OPENQASM 2.0;
qreg q[2];
ry(pi/2) q[0];
ry(-pi/2) q[1];
rx(pi) q[0];
rz(-3*pi/4) q[1];
rzz(pi/2) q[0],q[1];
ry(-pi/4) q[0];
rz(-pi/2) q[0];
rzz(pi/2) q[0],q[1];
ry(pi/4) q[0];
ry(pi/2) q[1];
rzz(pi/2) q[0],q[1];
rz(-pi/2) q[1];
ry(pi/2) q[0];
ry(-pi/2) q[1];
rzz(pi/2) q[0],q[1];
rz(-pi/2) q[0];
rz(-pi/2) q[1];
ry(-pi/2) q[0];
ry(pi/2) q[1];
rzz(pi/2) q[0],q[1];
rz(pi/2) q[0];
rz(pi/2) q[1];
ry(pi/2) q[1];
"#
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Drops every timing field so reports can be compared across runs.
fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|key, _| !key.contains("wall_time"));
            for v in map.values_mut() {
                strip_timing(v);
            }
        }
        serde_json::Value::Array(items) => {
            for v in items {
                strip_timing(v);
            }
        }
        _ => {}
    }
}

#[test]
fn optimize_qft2_reports_five_to_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "qft2.qasm", qft2_qasm());
    let out = dir.path().join("opt.json");
    let report = dir.path().join("report.json");

    let result = retune()
        .args(["optimize", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert!(result.status.success(), "stderr: {}", stderr(&result));

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["input"]["entangling_count"], 5);
    assert!(doc["output"]["entangling_count"].as_u64().unwrap() <= 3);
    assert!(doc["report"]["idealized_fidelity"].as_f64().unwrap() >= 0.999);

    let verify = retune()
        .args(["verify", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .args(["--tolerance", "1e-3"])
        .output()
        .unwrap();
    assert!(verify.status.success());
    assert!(stdout(&verify).contains("idealized fidelity"));
}

#[test]
fn zero_error_rate_is_semantically_safe() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "small.json",
        r#"{ "n_qubits": 2, "global_phase": 0.25,
            "gates": [
              { "kind": "ry", "qubits": [0], "angle": 0.7 },
              { "kind": "rzz", "qubits": [0,1], "angle": 1.1 },
              { "kind": "rx", "qubits": [1], "angle": -0.4 }
            ] }"#,
    );
    let out = dir.path().join("out.json");
    let result = retune()
        .args(["optimize", "--error-rate", "0", "--fidelity-floor", "0.999999999", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(result.status.success(), "stderr: {}", stderr(&result));

    let verify = retune()
        .args(["verify", "--tolerance", "1e-8", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(verify.status.success(), "stderr: {}", stderr(&verify));
}

#[test]
fn syntax_error_exits_3_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.qasm", "qreg q[2];\nrx(1.0 q[0];\n");
    let result = retune()
        .args(["optimize", "--in"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(3));
    assert!(stderr(&result).contains("line 2"), "stderr: {}", stderr(&result));
}

#[test]
fn unsupported_gate_exits_4_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cy.qasm", "qreg q[2];\ncy q[0],q[1];\n");
    let result = retune()
        .args(["optimize", "--in"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(4));
    assert!(stderr(&result).contains("cy"));
}

#[test]
fn missing_file_exits_6() {
    let result = retune()
        .args(["optimize", "--in", "/nonexistent/file.qasm"])
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(6));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let result = retune()
        .args(["optimize", "--no-such-flag"])
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn verify_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.qasm", qft2_qasm());
    let copy = write(dir.path(), "b.qasm", qft2_qasm());
    let result = retune()
        .args(["verify", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&copy)
        .output()
        .unwrap();
    assert!(result.status.success());
    assert!(stdout(&result).contains("1.000000000000"));
}

#[test]
fn verify_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.qasm", "qreg q[1];\nrx(0.5) q[0];\n");
    let b = write(dir.path(), "b.qasm", "qreg q[1];\nrx(2.5) q[0];\n");
    let result = retune()
        .args(["verify", "--in"])
        .arg(&a)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn verify_ten_qubits_not_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("qreg q[10];\n");
    for i in 0..9 {
        text.push_str(&format!("rzz(0.5) q[{}],q[{}];\n", i, i + 1));
    }
    let a = write(dir.path(), "big.qasm", &text);
    let b = write(dir.path(), "big2.qasm", &text);
    let result = retune()
        .args(["verify", "--in"])
        .arg(&a)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(7));
    assert!(stdout(&result).contains("not verifiable"));
}

#[test]
fn runs_are_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "qft2.qasm", qft2_qasm());
    let mut circuits = Vec::new();
    let mut reports = Vec::new();
    for _run in 0..2 {
        let out = dir.path().join("out.json");
        let report = dir.path().join("report.json");
        let result = retune()
            .args(["optimize", "--seed", "42", "--in"])
            .arg(&input)
            .arg("--out")
            .arg(&out)
            .arg("--report")
            .arg(&report)
            .output()
            .unwrap();
        assert!(result.status.success());
        circuits.push(std::fs::read_to_string(&out).unwrap());
        let mut doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        strip_timing(&mut doc);
        reports.push(doc);
    }
    assert_eq!(circuits[0], circuits[1], "output circuits must be byte-identical");
    assert_eq!(reports[0], reports[1], "reports must match modulo timing");
}

#[test]
fn jobs_flag_does_not_change_the_output()  {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("qreg q[6];\n");
    for i in 0..5 {
        text.push_str(&format!("rzz(pi/2) q[{}],q[{}];\n", i, i + 1));
    }
    for i in 0..5 {
        text.push_str(&format!("rzz(pi/4) q[{}],q[{}];\n", i, i + 1));
    }
    let input = write(dir.path(), "chain.qasm", &text);
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let out = dir.path().join(format!("out{jobs}.json"));
        let result = retune()
            .args(["optimize", "--jobs", jobs, "--in"])
            .arg(&input)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(result.status.success(), "stderr: {}", stderr(&result));
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "worker count must not affect output");
}

#[test]
fn entangler_flag_converts_gate_set() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "qft2.qasm", qft2_qasm());
    let out = dir.path().join("fecr.json");
    let result = retune()
        .args(["optimize", "--entangler", "fecr", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains("\"rzz\""), "rzz survived the conversion");

    let verify = retune()
        .args(["verify", "--tolerance", "1e-2", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(verify.status.success(), "stderr: {}", stderr(&verify));
}
