use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE: &str = r#"{"masses": [1, 1, 1, 1],
  "positions": [[0.505, 0.498, 0.003], [-0.497, 0.502, -0.002], [-0.501, -0.496, 0.001], [0.499, -0.503, 0.0]]}"#;

const TRAPEZOID: &str = r#"{"masses": [1, 1, 0.5, 0.5],
  "positions": [[-0.5, 0.0], [0.5, 0.0], [0.36, 0.8], [-0.33, 0.82]], "constraint": "cocircular"}"#;

const TETRAHEDRON: &str = r#"{"masses": [1, 1, 1, 1],
  "distances": {"r12": 1, "r23": 1, "r34": 1, "r14": 1, "r13": 1, "r24": 1}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar-cc")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

#[test]
fn planarity_reports() {
    let dir = TempDir::new().unwrap();
    let sq = write(
        &dir,
        "sq.json",
        r#"{"masses": [1, 1, 1, 1], "positions": [[0, 0], [1, 0], [1, 1], [0, 1]]}"#,
    );
    let v = json(&run(&["planarity", "--input", &sq]));
    assert!(v["result"]["cm_value"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(v["result"]["cond4"]["holds_13"], true);
    assert_eq!(v["result"]["cond4"]["holds_24"], true);

    let tetra = write(&dir, "tetra.json", TETRAHEDRON);
    let v = json(&run(&["planarity", "--input", &tetra]));
    assert!((v["result"]["cm_value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!(v["result"]["affine_vector"].is_null());
}

#[test]
fn parse_failures_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{ not json");
    assert_eq!(run(&["planarity", "--input", &bad]).status.code(), Some(2));
    assert_eq!(run(&["planarity", "--input", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "ptolemy"]).status.code(), Some(2));
}

#[test]
fn solve_square_with_svg() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "sq.json", SQUARE);
    let svg = dir.path().join("sq.svg");
    let v = json(&run(&["solve", "--input", &input, "--svg", svg.to_str().unwrap()]));
    assert_eq!(v["result"]["classification"]["shape"], "square");
    assert_eq!(v["result"]["proposition"]["confirmed"], true);
    let lambda = v["result"]["solution"]["lambda_position"].as_f64().unwrap();
    assert!((lambda - (2.0 + 0.5f64.sqrt())).abs() < 1e-9);
    let drawing = fs::read_to_string(&svg).unwrap();
    assert!(drawing.starts_with("<svg") && drawing.contains("stroke-dasharray"));
}

#[test]
fn solve_cocircular_trapezoid() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "trap.json", TRAPEZOID);
    let v = json(&run(&["solve", "--input", &input]));
    assert_eq!(v["result"]["classification"]["shape"], "isosceles_trapezoid");
    let d = &v["result"]["solution"]["distances"];
    let diff = |p: &str, q: &str| (d[p].as_f64().unwrap() - d[q].as_f64().unwrap()).abs();
    assert!(diff("r13", "r24") < 1e-8 && diff("r14", "r23") < 1e-8);
}

#[test]
fn solver_failures_have_exit_codes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "sq.json", SQUARE);
    // Below the floating-point floor, so Newton cannot reach it.
    assert_eq!(run(&["solve", "--input", &input, "--tol", "1e-40"]).status.code(), Some(3));
    let collide = write(
        &dir,
        "collide.json",
        r#"{"masses": [1, 1, 1, 1], "positions": [[0, 0], [0, 0], [1, 0], [0, 1]]}"#,
    );
    assert_eq!(run(&["solve", "--input", &collide]).status.code(), Some(4));
    let unreal = write(
        &dir,
        "unreal.json",
        r#"{"masses": [1, 1, 1, 1], "distances": {"r12": 1, "r23": 1, "r34": 1, "r14": 1, "r13": 5, "r24": 5}}"#,
    );
    assert_eq!(run(&["solve", "--input", &unreal, "--constraint", "f1"]).status.code(), Some(4));
}

#[test]
fn verify_suites() {
    let v = json(&run(&["verify", "ptolemy", "--seed", "42"]));
    assert_eq!(v["result"]["passed"], true);
    let min = v["result"]["checks"][0]["worst"].as_f64().unwrap();
    assert!(min >= -1e-12);
    let v = json(&run(&["verify", "gradient-equality", "--seed", "7"]));
    assert_eq!(v["result"]["passed"], true);
    assert!(v["result"]["checks"][0]["worst"].as_f64().unwrap() < 1e-6);
    assert_eq!(run(&["verify", "nope", "--seed", "1"]).status.code(), Some(5));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        assert!(run(&["verify", "planarity", "--seed", "3", "--output", path.to_str().unwrap()]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let input = write(&dir, "trap.json", TRAPEZOID);
    assert_eq!(run(&["solve", "--input", &input]).stdout, run(&["solve", "--input", &input]).stdout);
}

#[test]
fn residuals_at_the_square() {
    let dir = TempDir::new().unwrap();
    let t = 2f64.powf(-1.5);
    let doc = format!(
        r#"{{"masses": [1, 1, 1, 1], "positions": [[0, 0], [1, 0], [1, 1], [0, 1]],
            "multipliers": {{"lambda": {}, "eta": {}}}}}"#,
        (1.0 + t) / 2.0,
        (t - 1.0) / 2.0
    );
    let input = write(&dir, "res.json", &doc);
    for constraint in ["f1", "f2"] {
        let v = json(&run(&["residuals", "--input", &input, "--constraint", constraint]));
        let pairs = v["result"]["report"]["pairs"].as_object().unwrap();
        assert!(pairs.values().all(|x| x.as_f64().unwrap().abs() < 1e-12));
        assert_eq!(v["result"]["fitted"], false);
    }
    let v = json(&run(&["residuals", "--input", &input]));
    assert!(v["result"]["residual_norm"].as_f64().unwrap() < 1e-12);
    assert_eq!(run(&["residuals", "--input", &input, "--constraint", "both"]).status.code(), Some(2));
}

#[test]
fn classify_command() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "concave.json",
        r#"{"masses": [1, 1, 1, 1], "positions": [[0, 0], [1, 0], [0, 1], [0.3, 0.3]]}"#,
    );
    let v = json(&run(&["classify", "--input", &input]));
    assert_eq!(v["result"]["convexity"]["kind"], "concave");
    assert_eq!(v["result"]["convexity"]["interior"], 4);
}

#[test]
fn sweep_command() {
    let dir = TempDir::new().unwrap();
    let doc = r#"{"masses": [1, 1, 1, 1], "constraint": "cocircular",
        "distances": {"r12": 1, "r23": 1, "r34": 1, "r14": 1, "r13": 1.4142135623730951, "r24": 1.4142135623730951},
        "mass_path": [[1, 1, 0.9, 0.9], [1, 1, 0.7, 0.7], [1, 1, 0.5, 0.5]]}"#;
    let input = write(&dir, "sweep.json", doc);
    let out = dir.path().join("sweep_out.json");
    let status = run(&["sweep", "--input", &input, "--output", out.to_str().unwrap()]).status;
    assert!(status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(v["result"]["completed"], true);
    assert_eq!(v["result"]["results"].as_array().unwrap().len(), 3);

    let broken = doc.replace("[1, 1, 0.5, 0.5]", "[1, 1, 0, 0]");
    let input = write(&dir, "broken.json", &broken);
    let out = run(&["sweep", "--input", &input]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["last_good"], 1);
}

#[test]
fn concave_branch_under_f1() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "concave.json",
        r#"{"masses": [1, 1, 1, 1], "positions": [[1, 0], [-0.52, 0.85], [-0.48, -0.88], [0.03, 0.02]]}"#,
    );
    let v = json(&run(&["solve", "--input", &input, "--constraint", "f1"]));
    assert_eq!(v["result"]["classification"]["convexity"]["interior"], 4);
    let d = &v["result"]["solution"]["distances"];
    let diff = |p: &str, q: &str| (d[p].as_f64().unwrap() - d[q].as_f64().unwrap()).abs();
    // Isosceles triangle with the interior body on its axis.
    assert!(diff("r12", "r13") < 1e-8 && diff("r24", "r34") < 1e-8);
}
