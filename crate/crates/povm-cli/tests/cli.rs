//! End-to-end tests for the `povm` binary: exit codes, report schema,
//! pipeline composition via stdin, and byte determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn povm_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_povm"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    povm_bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], dir: &Path, stdin: &[u8]) -> Output {
    let mut child = povm_bin()
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.as_mut().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn json_of(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

const QUBIT_POVM: &str = r#"{
  "labels": ["x0", "x1"],
  "dim": 2,
  "effects": [
    {"dim": 2, "re": [[0.7, 0.0], [0.0, 0.2]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    {"dim": 2, "re": [[0.3, 0.0], [0.0, 0.8]], "im": [[0.0, 0.0], [0.0, 0.0]]}
  ]
}"#;

const BAD_NORMALIZATION_POVM: &str = r#"{
  "labels": ["x0", "x1"],
  "dim": 2,
  "effects": [
    {"dim": 2, "re": [[0.7, 0.0], [0.0, 0.2]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    {"dim": 2, "re": [[0.2, 0.0], [0.0, 0.8]], "im": [[0.0, 0.0], [0.0, 0.0]]}
  ]
}"#;

// 0.5|0⟩⟨0|, 0.5|+⟩⟨+|, and the normalization remainder; the first two
// pieces have commutator norm 0.125.
const NONCOMMUTATIVE_POVM: &str = r#"{
  "labels": ["a", "b", "c"],
  "dim": 2,
  "effects": [
    {"dim": 2, "re": [[0.5, 0.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    {"dim": 2, "re": [[0.25, 0.25], [0.25, 0.25]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    {"dim": 2, "re": [[0.25, -0.25], [-0.25, 0.75]], "im": [[0.0, 0.0], [0.0, 0.0]]}
  ]
}"#;

fn write_fixtures(dir: &Path) {
    std::fs::write(dir.join("qubit.json"), QUBIT_POVM).unwrap();
    std::fs::write(dir.join("bad.json"), BAD_NORMALIZATION_POVM).unwrap();
    std::fs::write(dir.join("noncomm.json"), NONCOMMUTATIVE_POVM).unwrap();
}

#[test]
fn validate_good_povm_passes() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let output = run(&["validate", "qubit.json"], dir.path());
    assert_eq!(output.status.code(), Some(0));
    let report = json_of(&output);
    assert_eq!(report["schema"], "povm-kit/1");
    assert_eq!(report["passed"], true);
    assert_eq!(report["inputs"][0]["path"], "qubit.json");
    assert!(report["inputs"][0]["sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn validate_bad_normalization_fails_with_defect() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let output = run(&["validate", "bad.json"], dir.path());
    assert_eq!(output.status.code(), Some(1));
    let report = json_of(&output);
    assert_eq!(report["passed"], false);
    let defect = report["results"]["validation"]["normalization_defect"]
        .as_f64()
        .unwrap();
    assert!((defect - 0.1).abs() < 1e-9);
}

#[test]
fn analyze_reports_noncommutativity_with_worst_pair() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let output = run(&["analyze", "noncomm.json"], dir.path());
    assert_eq!(output.status.code(), Some(0));
    let report = json_of(&output);
    assert_eq!(report["results"]["commutative"], false);
    assert_eq!(report["results"]["worst_pair"][0], "a");
    assert_eq!(report["results"]["worst_pair"][1], "b");
    let norm = report["results"]["max_commutator_norm"].as_f64().unwrap();
    assert!((norm - 0.125).abs() < 1e-9);
}

#[test]
fn sharpen_extract_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let sharp = run(
        &["sharpen", "qubit.json", "--labeling", "index"],
        dir.path(),
    );
    assert_eq!(sharp.status.code(), Some(0));
    // `-` takes the sharp version from stdin, mirroring
    // `povm sharpen povm.json | povm extract-kernel povm.json -`.
    let kernel = run_with_stdin(
        &["extract-kernel", "qubit.json", "-"],
        dir.path(),
        &sharp.stdout,
    );
    assert_eq!(kernel.status.code(), Some(0));
    let table = json_of(&kernel);
    assert_eq!(table["labels"][0], "x0");
    let entries = table["entries"].as_array().unwrap();
    assert!((entries[0][0].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((entries[1][0].as_f64().unwrap() - 0.7).abs() < 1e-12);

    std::fs::write(dir.path().join("sharp.json"), &sharp.stdout).unwrap();
    std::fs::write(dir.path().join("kernel.json"), &kernel.stdout).unwrap();
    let smeared = run(&["smear", "sharp.json", "kernel.json"], dir.path());
    assert_eq!(smeared.status.code(), Some(0));
    let povm = json_of(&smeared);
    let re = &povm["effects"][0]["re"];
    assert!((re[0][0].as_f64().unwrap() - 0.7).abs() < 1e-9);
    assert!((re[1][1].as_f64().unwrap() - 0.2).abs() < 1e-9);
}

#[test]
fn sharpen_rejects_noncommutative_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let output = run(&["sharpen", "noncomm.json"], dir.path());
    assert_eq!(output.status.code(), Some(1));
    let report = json_of(&output);
    assert_eq!(report["passed"], false);
    assert!(report["error"].as_str().unwrap().contains("commute"));
}

#[test]
fn malformed_json_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\"labels\": [\n").unwrap();
    let output = run(&["validate", "broken.json"], dir.path());
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line"), "missing location: {stderr}");
}

#[test]
fn continuity_report_on_triangular_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let step = 1e-3;
    let n = 1001;
    let density: Vec<f64> = (0..n)
        .map(|i| {
            let y = i as f64 * step;
            if y <= 0.5 {
                4.0 * y
            } else {
                4.0 * (1.0 - y)
            }
        })
        .collect();
    let kernel = serde_json::json!({
        "grid": {"start": 0.0, "step": step, "n": n},
        "density": density,
        "sup_bound": 2.0,
        "smooth": true,
    });
    std::fs::write(
        dir.path().join("tri.json"),
        serde_json::to_string(&kernel).unwrap(),
    )
    .unwrap();
    let output = run(
        &["continuity-report", "tri.json", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0));
    let report = json_of(&output);
    assert_eq!(report["results"]["feller"]["converged"], true);
    assert_eq!(report["results"]["abs"]["holds"], true);
    assert_eq!(report["results"]["strong"]["passes"], true);
    assert_eq!(report["results"]["norm1"]["obstruction"], true);
    assert_eq!(
        report["results"]["uniform"]["nested_family"]["verdict"],
        "converging"
    );

    // Byte determinism for a fixed seed.
    let again = run(
        &["continuity-report", "tri.json", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(output.stdout, again.stdout);
}

#[test]
fn demo_gaussian_reproduces_the_exhibits() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(
        &[
            "demo-gaussian",
            "--l",
            "1.0",
            "--grid",
            "-40:40:0.001",
            "--report",
            "demo.json",
        ],
        dir.path(),
    );
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("demo.json")).unwrap()).unwrap();
    let results = &report["results"];
    assert_eq!(results["lipschitz_certificate"]["passes"], true);
    assert_eq!(results["nonuniform_norms"]["verdict"], "non_converging");
    assert!(results["nonuniform_norms"]["min_norm"].as_f64().unwrap() >= 1.0 - 1e-6);
    assert_eq!(results["norm1"]["obstruction"], true);
    assert_eq!(results["erf_checks"]["passes"], true);
    assert_eq!(report["passed"], true);
}

#[test]
fn tolerance_flags_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let output = run(
        &["validate", "qubit.json", "--tol.norm", "1e-3"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0));
    let report = json_of(&output);
    assert_eq!(report["tolerances"]["norm"].as_f64().unwrap(), 1e-3);
    assert!(report["command"].as_str().unwrap().starts_with("povm "));
}
