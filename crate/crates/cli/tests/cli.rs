use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn csk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csk"))
        .args(args)
        .env_remove("CSK_TOL")
        .output()
        .expect("binary runs")
}

fn law(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

#[test]
fn half_stable_density_matches_formula() {
    let dir = TempDir::new().unwrap();
    let p = law(&dir, "hs.json", r#"{"kind":"free-half-stable","p":1.0}"#);
    let o = csk(&[
        "density",
        "--law",
        p.to_str().unwrap(),
        "--grid",
        "-5:-0.3:10",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("x,density,atom_weight\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 10);
    for (x, d) in r {
        let f = (-1.0 - 4.0 * x).sqrt() / (2.0 * std::f64::consts::PI * x * x);
        assert!((d - f).abs() <= 1e-13 * f, "{x}: {d} vs {f}");
    }
}

#[test]
fn grid_above_support_is_zero_and_atoms_trail() {
    let dir = TempDir::new().unwrap();
    let p = law(&dir, "t.json", r#"{"kind":"free-takacs","r":0.5}"#);
    let o = csk(&["density", "--law", p.to_str().unwrap(), "--grid", "1:3:5"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[1..6].iter().all(|l| l.ends_with(",0,0")));
    assert_eq!(lines[6], "-1,0,0.5");
}

#[test]
fn transform_rows() {
    let dir = TempDir::new().unwrap();
    let hs = law(&dir, "hs.json", r#"{"kind":"free-half-stable","p":1}"#);
    let o = csk(&[
        "transform",
        "--law",
        hs.to_str().unwrap(),
        "--which",
        "R",
        "--grid",
        "0.25:2:8",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\n0.25,-2\n"));
    // R lives on (0, 1); the rest is skipped with a note.
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped"));
    assert_eq!(rows(&stdout(&o)).len(), 3);

    let abel = law(&dir, "abel.json", r#"{"kind":"free-abel"}"#);
    let o = csk(&[
        "transform",
        "--law",
        abel.to_str().unwrap(),
        "--which",
        "PV",
        "--grid",
        "-3:-1:3",
    ]);
    assert!(stdout(&o).contains("\n-1,-2\n"));

    let o = csk(&[
        "transform",
        "--law",
        abel.to_str().unwrap(),
        "--which",
        "M",
        "--grid",
        "1e-7:0.1:2",
    ]);
    // M(θ) - 1 decays like sqrt(θ) when the mean diverges.
    let r = rows(&stdout(&o));
    assert!((r[0].1 - 1.0).abs() < 1e-3);
}

#[test]
fn numeric_transform_agrees_with_closed_form() {
    let dir = TempDir::new().unwrap();
    let p = law(
        &dir,
        "sc.json",
        r#"{"kind":"semicircle","center":0,"variance":1}"#,
    );
    let closed = csk(&[
        "transform",
        "--law",
        p.to_str().unwrap(),
        "--which",
        "G",
        "--grid",
        "2.5:6:5",
    ]);
    let numeric = csk(&[
        "transform",
        "--law",
        p.to_str().unwrap(),
        "--which",
        "G",
        "--grid",
        "2.5:6:5",
        "--numeric",
    ]);
    for (a, b) in rows(&stdout(&closed)).iter().zip(rows(&stdout(&numeric))) {
        assert!((a.1 - b.1).abs() < 1e-10);
    }
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let dir = TempDir::new().unwrap();
    let p = law(&dir, "c.json", r#"{"kind":"cubic","a":1,"b":2,"c":0}"#);
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let o = csk(&[
            "transform",
            "--law",
            p.to_str().unwrap(),
            "--which",
            "mean-of-theta",
            "--grid",
            "0.1:20:40",
            "--numeric",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&out2).unwrap());
}

#[test]
fn spec_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = law(&dir, "m.json", r#"{"kind":"cubic","a":1}"#);
    let extra = law(&dir, "e.json", r#"{"kind":"free-takacs","r":0.5,"s":1}"#);
    let invalid = law(&dir, "i.json", r#"{"kind":"free-half-stable","p":-1}"#);
    for p in [&missing, &extra, &invalid] {
        let o = csk(&["density", "--law", p.to_str().unwrap(), "--grid", "0:1:3"]);
        assert_eq!(o.status.code(), Some(2), "{}", p.display());
    }
    let o = csk(&[
        "density",
        "--law",
        missing.to_str().unwrap(),
        "--grid",
        "1:0:3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = csk(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let p = law(&dir, "hs.json", r#"{"kind":"free-half-stable","p":1}"#);
    let o = csk(&[
        "density",
        "--law",
        p.to_str().unwrap(),
        "--grid",
        "-0.3:-0.25:2",
        "--numeric",
        "--eps-schedule",
        "1,0.5",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tolerance_flag_beats_environment() {
    let dir = TempDir::new().unwrap();
    let p = law(
        &dir,
        "sc.json",
        r#"{"kind":"semicircle","center":0,"variance":1}"#,
    );
    let args = [
        "transform",
        "--law",
        p.to_str().unwrap(),
        "--which",
        "G",
        "--grid",
        "3:4:2",
    ];
    let bad_env = Command::new(env!("CARGO_BIN_EXE_csk"))
        .args(args)
        .env("CSK_TOL", "5")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_csk"))
        .args(args)
        .args(["--tol", "1e-9"])
        .env("CSK_TOL", "5")
        .output()
        .unwrap();
    assert!(flag_wins.status.success());
}

#[test]
fn verify_reports_are_versioned_json() {
    for suite in ["reciprocity", "domains", "gineq", "bis"] {
        let o = csk(&["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["schema"], "csk-report/1");
        let reports = v["reports"].as_array().unwrap();
        assert!(!reports.is_empty());
        for r in reports {
            let pass = r["pass"].as_bool().unwrap();
            assert_eq!(
                pass,
                r["max_residual"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap()
            );
            assert!(r["details"][0].get("expected").is_some());
        }
    }
}

#[test]
fn failing_checks_exit_1() {
    // A tolerance far below what quadrature can reach fails the numeric checks.
    let o = csk(&["verify", "domains", "--tol", "1e-18"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["pass"] == false));
}

#[test]
fn seeded_verification_is_reproducible() {
    let a = csk(&["verify", "gineq", "--seed", "7"]);
    let b = csk(&["verify", "gineq", "--seed", "7"]);
    let c = csk(&["verify", "gineq"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
