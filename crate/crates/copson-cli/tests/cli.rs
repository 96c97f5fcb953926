//! End-to-end tests of the `copson` binary: exit codes, JSON shapes, and the
//! reproducibility echo.

use assert_cmd::Command;
use predicates::prelude::*;

fn write_problem(dir: &tempdir::TempDir, body: &str) -> std::path::PathBuf {
    let path = dir.path().join("prob.toml");
    std::fs::write(&path, body).unwrap();
    path
}

mod tempdir {
    //! Minimal unique temp directory, removed on drop.
    use std::path::{Path, PathBuf};
    use std::sync::atomic::{AtomicU64, Ordering};

    static COUNTER: AtomicU64 = AtomicU64::new(0);

    pub struct TempDir(PathBuf);

    impl TempDir {
        pub fn new() -> Self {
            let n = COUNTER.fetch_add(1, Ordering::Relaxed);
            let dir = std::env::temp_dir().join(format!(
                "copson-cli-test-{}-{n}",
                std::process::id()
            ));
            std::fs::create_dir_all(&dir).unwrap();
            TempDir(dir)
        }

        pub fn path(&self) -> &Path {
            &self.0
        }
    }

    impl Drop for TempDir {
        fn drop(&mut self) {
            let _ = std::fs::remove_dir_all(&self.0);
        }
    }
}

fn copson() -> Command {
    Command::cargo_bin("copson").unwrap()
}

const LEBESGUE: &str = r#"
u = "pow(1,0)"
v = "pow(1,0)"
w = "pow(1,1)"
m = 1.0
p = 1.0
q = 1.0
"#;

#[test]
fn admissible_lebesgue_pair() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(&dir, LEBESGUE);
    copson()
        .args(["admissible", "-f"])
        .arg(&path)
        .arg("--json")
        .assert()
        .success()
        .stdout(predicate::str::contains("\"admissible\": true"));
}

#[test]
fn admissible_zero_u_exits_2_with_witness() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(0,0)"
v = "pow(1,0)"
m = 1.0
p = 1.0
"#,
    );
    copson()
        .args(["admissible", "-f"])
        .arg(&path)
        .arg("--json")
        .assert()
        .code(2)
        .stdout(predicate::str::contains("\"admissible\": false"))
        .stdout(predicate::str::contains("\"witness\":"));
}

#[test]
fn malformed_grammar_exits_1() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(1,"
v = "pow(1,0)"
m = 1.0
p = 1.0
"#,
    );
    copson()
        .args(["admissible", "-f"])
        .arg(&path)
        .assert()
        .code(1)
        .stderr(predicate::str::contains("u:"));
}

#[test]
fn discretize_lebesgue_is_powers_of_four() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(&dir, LEBESGUE);
    let out = copson()
        .args(["discretize", "-f"])
        .arg(&path)
        .args(["--json", "--depth", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["K"], "infinite");
    for entry in v["points"].as_array().unwrap() {
        let k = entry["k"].as_i64().unwrap();
        let t = entry["t_k"].as_f64().unwrap();
        let expect = 4f64.powi(k as i32);
        assert!((t / expect - 1.0).abs() <= 1e-6, "t_{k} = {t}");
    }
    for key in ["v_growth", "phi_growth", "v_equality", "phi_equality"] {
        assert!(v["residuals"][key].as_f64().unwrap() <= 1e-6);
    }
}

#[test]
fn discretize_decaying_v_reports_zero_kind() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "exp(1,-1)"
v = "exp(1,-1)"
m = 1.0
p = 1.0
"#,
    );
    let out = copson()
        .args(["discretize", "-f"])
        .arg(&path)
        .args(["--json", "--depth", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["K"], "zero");
    assert_eq!(v["t0"], "inf");
}

#[test]
fn embed_exact_constant_fixture() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(&dir, LEBESGUE);
    let out = copson()
        .args(["embed", "-f"])
        .arg(&path)
        .arg("--json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["case"], "I");
    assert_eq!(v["embedding_holds"], true);
    assert!((v["C_estimate"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn embed_oracle_section() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        &format!(
            "{LEBESGUE}
[options]
candidates = 48
local_steps = 32
knot_count = 6
"
        ),
    );
    let out = copson()
        .args(["embed", "-f"])
        .arg(&path)
        .args(["--json", "--oracle", "--seed", "11"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["C_emp"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!((v["ratio"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert_eq!(v["problem"]["options"]["seed"], 11);
}

#[test]
fn embed_divergent_condition_exits_2() {
    // u = v = 1, w = t^4, m = p = q = 1: the case-I supremum diverges at inf
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(1,0)"
v = "pow(1,0)"
w = "pow(1,4)"
m = 1.0
p = 1.0
q = 1.0
"#,
    );
    let out = copson()
        .args(["embed", "-f"])
        .arg(&path)
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["embedding_holds"], false);
    assert_eq!(v["conditions"]["A7"], "inf");
}

#[test]
fn assoc_hand_fixture() {
    // sup min(t,1)/phi(t) = 3/16 for u = t^{-1/2}, v = t^{-3/4}, m = p = 1
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(1,-0.5)"
v = "pow(1,-0.75)"
m = 1.0
p = 1.0
g = "step([1],[1])"

[options]
lo_exp = -20
hi_exp = 20
points_per_octave = 8
tol = 1e-8
"#,
    );
    let out = copson()
        .args(["assoc", "-f"])
        .arg(&path)
        .arg("--json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["norm"].as_f64().unwrap() - 0.1875).abs() <= 1e-4);
}

#[test]
fn assoc_zero_g_is_zero() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(1,-0.5)"
v = "pow(1,-0.75)"
m = 1.0
p = 1.0
g = "step([1],[0])"
"#,
    );
    let out = copson()
        .args(["assoc", "-f"])
        .arg(&path)
        .arg("--json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["norm"].as_f64().unwrap(), 0.0);
}

#[test]
fn assoc_non_admissible_exits_2() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(0,0)"
v = "pow(1,0)"
m = 1.0
p = 1.0
g = "step([1],[1])"
"#,
    );
    copson()
        .args(["assoc", "-f"])
        .arg(&path)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("not admissible"));
}

#[test]
fn verify_runs_full_suite() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(
        &dir,
        r#"
u = "pow(1,0)"
v = "pow(1,0)"
w = "pow(1,1)"
m = 1.0
p = 1.0
q = 1.0
g = "step([1],[1])"
"#,
    );
    let out = copson()
        .args(["verify", "-f"])
        .arg(&path)
        .arg("--json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["admissible"], true);
    assert_eq!(v["embedding"]["embedding_holds"], true);
    // the problem echo makes every report reproducible
    assert_eq!(v["problem"]["u"], "pow(1,0)");
    assert_eq!(v["problem"]["options"]["lo_exp"], -40);
    assert_eq!(v["problem"]["options"]["points_per_octave"], 16);
}

#[test]
fn tol_flag_overrides_options() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(&dir, LEBESGUE);
    let out = copson()
        .args(["admissible", "-f"])
        .arg(&path)
        .args(["--json", "--tol", "1e-6"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["problem"]["options"]["tol"].as_f64().unwrap(), 1e-6);
}

#[test]
fn phi_evaluates_at_points() {
    let dir = tempdir::TempDir::new();
    let path = write_problem(&dir, LEBESGUE);
    let out = copson()
        .args(["phi", "-f"])
        .arg(&path)
        .args(["--json", "--at", "1,4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["points"].as_array().unwrap();
    // phi(t) = t^2/2 for u = v = 1, m = p = 1
    assert!((rows[0]["phi"].as_f64().unwrap() - 0.5).abs() <= 1e-6);
    assert!((rows[1]["phi"].as_f64().unwrap() - 8.0).abs() <= 1e-5 * 8.0);
}
