use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gf2class(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gf2class")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn make(dir: &Path, family: &str) -> PathBuf {
    let path = dir.join(format!("{}.txt", family.replace(':', "-")));
    let out = gf2class(&["make", family, "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn make_classify_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    for (family, letter) in [("frobenius73", "(b)"), ("symplectic:6", "(d)"), ("orthogonal:6:minus", "(e)"), ("f4-unitary:3", "(h)")] {
        let gens = make(dir.path(), family);
        let report = dir.path().join("report.json");
        let out = gf2class(&["classify", gens.to_str().unwrap(), "--report-out", report.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{family}");
        assert!(String::from_utf8_lossy(&out.stdout).contains(letter), "{family}");
        let out = gf2class(&["verify", report.to_str().unwrap(), gens.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{family}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let gens = make(dir.path(), "alternating:7");
    let a = gf2class(&["classify", gens.to_str().unwrap(), "--format", "json"]);
    let b = gf2class(&["classify", gens.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report = dir.path().join("r.json");
    gf2class(&["classify", gens.to_str().unwrap(), "--report-out", report.to_str().unwrap()]);
    assert_eq!(fs::read(&report).unwrap(), a.stdout);
}

#[test]
fn failing_hypotheses_exit_one() {
    let dir = TempDir::new().unwrap();
    for family in ["fixed-block:2:4", "partial-dual:4", "alternating:6"] {
        let gens = make(dir.path(), family);
        let out = gf2class(&["classify", gens.to_str().unwrap(), "--format", "json"]);
        assert_eq!(code(&out), 1, "{family}");
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(json["branch"].is_null(), "{family}");
        assert_eq!(code(&gf2class(&["census", gens.to_str().unwrap()])), 1, "{family}");
    }
}

#[test]
fn class_cap_exits_two() {
    let dir = TempDir::new().unwrap();
    let gens = make(dir.path(), "symplectic:6");
    let out = gf2class(&["classify", gens.to_str().unwrap(), "--max-class", "10"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_input_exits_three() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&gf2class(&["classify", missing.to_str().unwrap()])), 3);
    let garbage = dir.path().join("garbage.txt");
    fs::write(&garbage, "2 2\n10\n0x\n").unwrap();
    assert_eq!(code(&gf2class(&["classify", garbage.to_str().unwrap()])), 3);
    let gens = make(dir.path(), "frobenius73");
    assert_eq!(code(&gf2class(&["classify", gens.to_str().unwrap(), "--seed-index", "9"])), 3);
    assert_eq!(code(&gf2class(&["no-such-command"])), 3);
    assert_eq!(code(&gf2class(&["make", "transvection"])), 3);
    assert_eq!(code(&gf2class(&["--help"])), 0);
}

#[test]
fn corrupted_report_fails_verify() {
    let dir = TempDir::new().unwrap();
    let gens = make(dir.path(), "orthogonal:6:plus");
    let report = dir.path().join("report.json");
    gf2class(&["classify", gens.to_str().unwrap(), "--report-out", report.to_str().unwrap()]);
    let text = fs::read_to_string(&report).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["group_order"] = serde_json::json!(json["group_order"].as_u64().unwrap() + 1);
    fs::write(&report, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    let out = gf2class(&["verify", report.to_str().unwrap(), gens.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    let other = make(dir.path(), "orthogonal:6:minus");
    fs::write(&report, text).unwrap();
    assert_eq!(code(&gf2class(&["verify", report.to_str().unwrap(), other.to_str().unwrap()])), 3);
}

#[test]
fn census_prints_geometry() {
    let dir = TempDir::new().unwrap();
    let gens = make(dir.path(), "symplectic:4");
    let out = gf2class(&["census", gens.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("points      15"), "{text}");
    assert!(text.contains("lines       20"), "{text}");
}
