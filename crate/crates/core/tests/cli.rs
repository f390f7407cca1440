//! End-to-end runs of the `formsteklov` binary: exit codes, output files,
//! schema conformance, and reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use formsteklov::mesh::read_mesh;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_formsteklov");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("FORMSTEKLOV_JOBS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema")
}

fn load(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema: &str, instance: &Value) {
    let dir = schema_dir();
    let common = load(&dir.join("common.schema.json"));
    let id = common["$id"].as_str().unwrap().to_string();
    let validator = jsonschema::options()
        .with_resource(id, jsonschema::Resource::from_contents(common).unwrap())
        .build(&load(&dir.join(schema)))
        .unwrap();
    let errors: Vec<String> = validator
        .iter_errors(instance)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{schema}: {errors:#?}");
}

/// JSON printed after the human-readable lines.
fn stdout_json(out: &Output) -> Value {
    let s = String::from_utf8_lossy(&out.stdout);
    let start = s.find("\n{").map(|i| i + 1).unwrap_or(0);
    serde_json::from_str(&s[start..]).unwrap()
}

fn verdicts(report: &Value, verdict: &str) -> usize {
    report["runs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["verdict"] == verdict)
        .count()
}

#[test]
fn gen_writes_a_readable_mesh_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mesh");
    let b = dir.path().join("b.mesh");
    for p in [&a, &b] {
        let out = run(&[
            "gen",
            "--domain",
            "annulus",
            "--level",
            "2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let cx = read_mesh(&a).unwrap();
    assert_eq!(cx.dim(), 2);
    assert_eq!(cx.boundary().unwrap().n_components(), 2);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.mesh");
    for args in [
        vec!["gen", "--domain", "ellipse", "--a", "1", "--b", "-0.5"],
        vec!["gen", "--domain", "shell", "--rin", "2", "--rout", "1"],
        vec!["gen", "--domain", "all"],
        vec!["verify", "--domain", "disk", "--checks", "CHK-NOPE"],
        vec!["verify", "--domain", "disk", "--levels", "2..3"],
        vec!["spectrum", "--mesh", missing.to_str().unwrap()],
        vec!["spectrum", "--domain", "disk", "--degree", "3"],
        vec!["spectrum"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn spectrum_output_matches_schema_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.json");
    let out = run(&[
        "spectrum",
        "--domain",
        "disk",
        "--levels",
        "2..4",
        "--count",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = load(&path);
    assert_valid("spectrum.schema.json", &json);
    assert_eq!(json["spectra"].as_array().unwrap().len(), 3);
    let exact = [0.0, 1.0, 1.0, 2.0, 2.0];
    for (s, e) in json["studies"].as_array().unwrap().iter().zip(exact) {
        assert!(
            (s["extrapolated"].as_f64().unwrap() - e).abs() < 1e-2,
            "{s}"
        );
    }
}

#[test]
fn spectrum_reads_mesh_files() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("ball.mesh");
    assert_eq!(
        code(&run(&[
            "gen",
            "--domain",
            "ball",
            "--level",
            "1",
            "--out",
            mesh.to_str().unwrap()
        ])),
        0
    );
    let out = run(&[
        "spectrum",
        "--mesh",
        mesh.to_str().unwrap(),
        "--degree",
        "2",
        "--dual",
        "--count",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_valid("spectrum.schema.json", &json);
    // Relative problem in the top degree: one constant-like kernel vector.
    assert_eq!(json["spectra"][0]["kernel_dim"], 1);
}

#[test]
fn verify_writes_report_tables_and_charts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disk.json");
    let out = run(&[
        "verify",
        "--domain",
        "disk",
        "--levels",
        "4",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = load(&path);
    assert_valid("report.schema.json", &report);
    assert_eq!(verdicts(&report, "FAIL"), 0);
    assert!(verdicts(&report, "EQUALITY-DETECTED") >= 2);
    for suffix in ["eigenvalues.csv", "disk.plot.csv", "disk.svg"] {
        let f = dir.path().join(format!("disk.{suffix}"));
        assert!(fs::metadata(&f).unwrap().len() > 0, "{}", f.display());
    }
    let outputs = report["config"]["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 4);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0 FAIL"), "{stdout}");
}

#[test]
fn ellipse_shows_no_equality() {
    let out = run(&[
        "verify", "--domain", "ellipse", "--a", "1", "--b", "0.7", "--levels", "4",
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0 EQUALITY-DETECTED"), "{stdout}");
}

#[test]
fn zero_tolerance_turns_equalities_into_failures() {
    let out = run(&[
        "verify",
        "--domain",
        "disk",
        "--levels",
        "1..3",
        "--checks",
        "CHK-ISO-N",
        "--tolerance-floor",
        "0",
        "--error-bar-factor",
        "0",
    ]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = [
        "--deterministic",
        "verify",
        "--domain",
        "annulus",
        "--levels",
        "1..3",
        "--report",
        path.to_str().unwrap(),
    ];
    let mut bytes = Vec::new();
    for _ in 0..2 {
        assert_eq!(code(&run(&args)), 0);
        bytes.push(fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let report: Value = serde_json::from_slice(&bytes[0]).unwrap();
    assert_eq!(report["config"]["jobs"], 1);
    assert_eq!(report["config"]["deterministic"], true);
}

#[test]
fn parallel_matches_serial() {
    let dir = tempfile::tempdir().unwrap();
    let serial = dir.path().join("serial.json");
    let parallel = dir.path().join("parallel.json");
    let common = [
        "verify",
        "--domain",
        "disk,annulus",
        "--levels",
        "1..3",
        "--report",
    ];
    let mut a: Vec<&str> = vec!["--deterministic"];
    a.extend(common);
    a.push(serial.to_str().unwrap());
    let mut b: Vec<&str> = vec!["--jobs", "4"];
    b.extend(common);
    b.push(parallel.to_str().unwrap());
    assert_eq!(code(&run(&a)), 0);
    assert_eq!(code(&run(&b)), 0);
    let (ra, rb) = (load(&serial), load(&parallel));
    let (runs_a, runs_b) = (
        ra["runs"].as_array().unwrap(),
        rb["runs"].as_array().unwrap(),
    );
    assert_eq!(runs_a.len(), runs_b.len());
    for (x, y) in runs_a.iter().zip(runs_b) {
        assert_eq!(x["instance"], y["instance"]);
        assert_eq!(x["verdict"], y["verdict"]);
        for key in ["lhs", "rhs", "margin"] {
            let (u, v) = (x[key].as_f64().unwrap(), y[key].as_f64().unwrap());
            assert!(
                (u - v).abs() <= 1e-12 * (1.0 + u.abs()),
                "{} {key}: {u} vs {v}",
                x["instance"]
            );
        }
    }
}

#[test]
fn jobs_default_comes_from_the_environment() {
    let out = Command::new(BIN)
        .args([
            "spectrum", "--domain", "disk", "--levels", "1..3", "--count", "2",
        ])
        .env("FORMSTEKLOV_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["config"]["jobs"], 3);
}
