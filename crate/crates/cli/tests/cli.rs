use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maxwass"));
    c.env_remove("MAXWASS_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

/// `mu(0, 1, ln 2) = 1/5 delta_(-2,-2) + 4/5 delta_(1/2,1/2)`.
fn kloeckner(dir: &Path) -> PathBuf {
    write(
        dir,
        "k.json",
        r#"{"atoms": [{"x": ["-2", "-2"], "w": "1/5"}, {"x": ["1/2", "1/2"], "w": "4/5"}]}"#,
    )
}

#[test]
fn dist_reproduces_sqrt_five() {
    let dir = TempDir::new().unwrap();
    let k = kloeckner(dir.path());
    let k = k.to_str().unwrap();
    let o = run(&["dist", k, "--dirac", "2,0", "--p", "2"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 5f64.sqrt()).abs() < 1e-12, "{v}");

    let plan = dir.path().join("plan.csv");
    let o = run(&["dist", k, "--dirac", "2,0", "--p", "2", "--exact", "--plan", plan.to_str().unwrap()]);
    assert_eq!(stdout(&o), "5\n");
    let csv = fs::read_to_string(plan).unwrap();
    assert!(csv.starts_with("i,j,x_i,y_j,weight,cost\n"));
    assert!(csv.contains("0,0,-2 -2,2 0,1/5,16"), "{csv}");
}

#[test]
fn dist_of_a_measure_to_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let k = kloeckner(dir.path());
    let k = k.to_str().unwrap();
    assert_eq!(stdout(&run(&["dist", k, k])), "0\n");
    let o = run(&["dist", k, k, "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["distance"], 0.0);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let k = kloeckner(dir.path());
    let k = k.to_str().unwrap();
    assert_eq!(run(&["dist", k, "--dirac", "2,0", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["dist", k, "--dirac", "2,0", "--mode", "square"]).status.code(), Some(3));
    assert_eq!(run(&["dist", k, "--dirac", "2,0", "--p", "1.5", "--exact"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", r#"{"atoms": [{"x": [0, 0], "w": 0.4}]}"#);
    assert_eq!(run(&["dist", bad.to_str().unwrap(), k]).status.code(), Some(2));
    assert_eq!(run(&["dist", "missing.json", k]).status.code(), Some(2));
    let o = run(&["verify", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty() && !o.stderr.is_empty());
    // the first measure of a p = 1 symmetric construction must lie on a diagonal
    let off = write(dir.path(), "off.json", r#"{"atoms": [{"x": [0, 0], "w": 0.5}, {"x": [2, 0], "w": 0.5}]}"#);
    assert_eq!(run(&["symmetric", off.to_str().unwrap(), "--dirac", "3,0", "--p", "1"]).status.code(), Some(3));
}

#[test]
fn radon_of_two_atoms() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", r#"{"atoms": [{"x": ["0", "0"], "w": "1/2"}, {"x": ["2", "0"], "w": "1/2"}]}"#);
    let o = run(&["radon", m.to_str().unwrap(), "--exact"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let plus = maxwass::DiscreteMeasure::<maxwass::Rational>::from_json(&v["plus"]).unwrap();
    let minus = maxwass::DiscreteMeasure::<maxwass::Rational>::from_json(&v["minus"]).unwrap();
    let two = |a: [i64; 2], b: [i64; 2]| {
        maxwass::DiscreteMeasure::from_pairs(vec![
            (maxwass::Point2::from_i64(a[0], a[1]), maxwass::q(1, 2)),
            (maxwass::Point2::from_i64(b[0], b[1]), maxwass::q(1, 2)),
        ])
        .unwrap()
    };
    assert_eq!(plus, two([0, 0], [1, 1]));
    assert_eq!(minus, two([0, 0], [1, -1]));
}

#[test]
fn project_and_interp() {
    let dir = TempDir::new().unwrap();
    let k = kloeckner(dir.path());
    let o = run(&["project", k.to_str().unwrap(), "--line", "+,0", "--exact"]);
    let got = maxwass::DiscreteMeasure::<maxwass::Rational>::from_json_str(&stdout(&o)).unwrap();
    let want = maxwass::DiscreteMeasure::<maxwass::Rational>::from_json_str(&fs::read_to_string(&k).unwrap()).unwrap();
    assert_eq!(got, want);

    let o = run(&["interp", "--dirac=-1,-1", "--s", "1/2", "--corner", "1,1", "--exact"]);
    let got = maxwass::DiscreteMeasure::<maxwass::Rational>::from_json_str(&stdout(&o)).unwrap();
    assert_eq!(got, maxwass::DiscreteMeasure::dirac(maxwass::Point2::from_i64(0, 0)));
}

#[test]
fn symmetric_dilation() {
    let o = run(&["symmetric", "--dirac", "0,0", "--dirac", "1,2", "--exact", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x1,x2,weight\n2,4,1\n");
}

#[test]
fn perturb_reports_equal_costs() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "mu.json", r#"{"atoms": [{"x": [0, 0], "w": "1/3"}, {"x": [3, 1], "w": "2/3"}]}"#);
    // the cycle shift of 1/4 through (0,0) and (3,1)
    let xi = write(
        dir.path(),
        "xi.json",
        r#"{"atoms": [{"x": [0, 0], "w": "1/12"}, {"x": [1, -1], "w": "1/4"},
                      {"x": [2, 2], "w": "1/4"}, {"x": [3, 1], "w": "5/12"}]}"#,
    );
    let o = run(&[
        "perturb",
        mu.to_str().unwrap(),
        "--xi",
        xi.to_str().unwrap(),
        "--a",
        "1/6",
        "--x-prime",
        "21/10,21/10",
        "--exact",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["expected"], "1/600");
    assert_eq!(v["c0"], "1/10");
}

#[test]
fn verify_is_deterministic_and_honours_the_seed_variable() {
    let a = run(&["verify", "q-corners", "--seed", "3"]);
    assert!(a.status.success());
    assert!(stdout(&a).contains("PASS"));
    let b = run(&["verify", "q-corners", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);

    let env = bin().args(["verify", "q-corners", "--seed", "3", "--format", "json"]).env("MAXWASS_SEED", "5").output().unwrap();
    let plain = run(&["verify", "q-corners", "--seed", "5", "--format", "json"]);
    assert_eq!(env.stdout, plain.stdout);
    let v: Value = serde_json::from_slice(&plain.stdout).unwrap();
    assert_eq!(v[0]["name"], "q-corners");
}

#[test]
fn verify_w2_table_lists_the_values() {
    let o = run(&["verify", "w2-table", "--exact"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("status"));
    for v in ["= 5\n", "= 29/5\n", "= 5/2\n", "= 13/8\n", "= 61/40\n"] {
        assert!(out.contains(v), "{v} missing from {out}");
    }
}

#[test]
fn reproduce_lists_two_passing_reports() {
    let o = run(&["reproduce-paper"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
