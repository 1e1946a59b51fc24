use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn meridian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meridian"))
        .args(args)
        .env_remove("MERIDIAN_FD_STEP")
        .output()
        .unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SPHERE: &str = r#"{"surface": {"family": "meridian", "curve": {"kind": "great_circle"},
    "profile": {"kind": "sphere_arc", "k": 1.0, "u0": 0.0}},
    "grid": {"u": [0.3, 2.8, 10], "v": [0.0, 6.0, 10]}}"#;

const CASE_II: &str = r#"{"surface": {"family": "meridian", "curve": {"kind": "circle", "kappa": 2.0},
    "profile": {"kind": "line", "theta": 0.9, "f0": 1.0}},
    "grid": {"u": [0.0, 2.0, 8], "v": [0.0, 6.0, 8]}}"#;

const CASE_III: &str = r#"{"surface": {"family": "meridian", "curve": {"kind": "circle", "kappa": 1.0},
    "profile": {"kind": "sphere_arc"}},
    "grid": {"u": [0.8, 1.5, 5], "v": [0.0, 6.0, 5]}}"#;

fn summary_value<'a>(csv: &'a str, key: &str) -> &'a str {
    let prefix = format!("# {key}=");
    csv.lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("no {key} in summary"))
}

#[test]
fn sphere_rows_have_unit_curvature() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "sphere.json", SPHERE);
    let out = dir.path().join("out.csv");
    let run = meridian(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|c| *c == "K").unwrap();
    let rows: Vec<Vec<f64>> = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| (r[k] - 1.0).abs() < 1e-9));
    assert_eq!(summary_value(&csv, "rows_emitted"), "100");
    assert_eq!(summary_value(&csv, "rows_skipped"), "0");
}

#[test]
fn case_ii_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c2.json", CASE_II);
    let out = dir.path().join("out.csv");
    assert_eq!(
        meridian(&["analyze", "--config", s(&cfg), "--out", s(&out)])
            .status
            .code(),
        Some(0)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(summary_value(&csv, "case"), "II");
    assert_eq!(summary_value(&csv, "semi_parallel"), "true");
    assert_eq!(summary_value(&csv, "theorem2_branch"), "case_i");
}

#[test]
fn json_output_parses() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c3.json", CASE_III);
    let out = dir.path().join("out.json");
    let run = meridian(&[
        "analyze",
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--format",
        "json",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 25);
    assert_eq!(doc["summary"]["classification"]["case"], "III");
    assert_eq!(doc["summary"]["semi_parallel"], false);
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"surface": {"family": "meridian", "curve": {"kind": "great_circle"}},
            "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#,
    );
    let out = dir.path().join("out.csv");
    let run = meridian(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(
        meridian(&["analyze", "--config", "/nonexistent.json", "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn evaluation_error_exits_3_and_names_the_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "stiff.json",
        r#"{"surface": {"family": "meridian", "curve": {"kind": "custom", "kappa": 5000},
            "profile": {"kind": "line", "theta": 1.0, "f0": 1.0}},
            "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#,
    );
    let out = dir.path().join("out.csv");
    let run = meridian(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("(u=0, v=0)"));
    assert!(!out.exists());
}

#[test]
fn pole_rows_are_skipped_and_counted() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "pole.json",
        r#"{"surface": {"family": "meridian", "curve": {"kind": "great_circle"}, "profile": {"kind": "sphere_arc"}},
            "grid": {"u": [0.0, 1.0, 5], "v": [0, 1, 3]}}"#,
    );
    let out = dir.path().join("out.csv");
    let run = meridian(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stderr).contains("skipped 3"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let emitted: usize = summary_value(&csv, "rows_emitted").parse().unwrap();
    let skipped: usize = summary_value(&csv, "rows_skipped").parse().unwrap();
    assert_eq!((emitted, skipped), (12, 3));
}

#[test]
fn analyze_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c3.json", CASE_III);
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        meridian(&[
            "analyze",
            "--config",
            s(&cfg),
            "--out",
            s(&a),
            "--format",
            format,
        ]);
        meridian(&[
            "analyze",
            "--config",
            s(&cfg),
            "--out",
            s(&b),
            "--format",
            format,
        ]);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn classify_examples() {
    let dir = TempDir::new().unwrap();
    let run = meridian(&[
        "classify",
        "--config",
        s(&write_config(&dir, "sphere.json", SPHERE)),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(
        (doc["case"].as_str(), doc["theorem2_branch"].as_str()),
        (Some("I"), Some("case_ii"))
    );
    assert_eq!(doc["semi_parallel"], true);

    let run = meridian(&[
        "classify",
        "--config",
        s(&write_config(&dir, "c3.json", CASE_III)),
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(
        (doc["case"].as_str(), doc["theorem2_branch"].as_str()),
        (Some("III"), Some("not_semi_parallel"))
    );

    let imm = write_config(
        &dir,
        "imm.json",
        r#"{"surface": {"family": "immersion", "immersion": "clifford_torus"}, "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#,
    );
    assert_eq!(
        meridian(&["classify", "--config", s(&imm)]).status.code(),
        Some(4)
    );
}

#[test]
fn verify_passes_and_reports_the_sqrt_profile() {
    let run = meridian(&["verify"]);
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(run.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("INFO ode: sqrt profile a=0, b=1")));
}

#[test]
fn verify_filter_selects_meridian_groups() {
    let run = meridian(&["verify", "--filter", "meridian"]);
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(run.status.code(), Some(0));
    assert!(!text.contains("immersions ["));
    assert!(text
        .lines()
        .filter(|l| l.starts_with("PASS"))
        .all(|l| l.contains("meridian")));
    assert_eq!(
        meridian(&["verify", "--filter", "no-such-group"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn coarse_step_override_fails_numeric_groups() {
    let run = Command::new(env!("CARGO_BIN_EXE_meridian"))
        .args(["verify", "--filter", "numeric"])
        .env("MERIDIAN_FD_STEP", "0.1")
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stdout).contains("FAIL"));
}
