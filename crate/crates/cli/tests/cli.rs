use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn tscv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tscv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn example(g1: f64, g2: f64) -> String {
    format!(
        r#"{{
  "timescale": {{"points": [1, 3, 4]}},
  "kind": "delta-nabla",
  "gamma1": {g1}, "gamma2": {g2},
  "lagrangian_delta": "t*v^2", "lagrangian_nabla": "t*v^2",
  "boundary": {{"alpha": 0, "beta": 1}}
}}"#
    )
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn solve_example_writes_table_and_report() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "ex1.json", &example(1.0, 1.0));
    let (out, report) = (dir.path().join("y.csv"), dir.path().join("r.json"));
    let o = tscv(&["solve", s(&file), "--out", s(&out), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let table = rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(table[0], ["t", "y", "y_delta", "y_nabla", "residual_el1", "residual_el2"]);
    assert_eq!(table.len(), 4);
    let y3: f64 = table[2][1].parse().unwrap();
    assert!((y3 - 7.0 / 9.0).abs() < 1e-9);
    // y^Δ is undefined at b, y^∇ at a, EL1 lives on I_κ and EL2 on I^κ.
    assert_eq!(table[1][3], "");
    assert_eq!(table[1][4], "");
    assert_eq!(table[3][2], "");
    assert_eq!(table[3][5], "");
    assert!(table[2].iter().all(|c| !c.is_empty()));

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["converged"], true);
    assert_eq!(json["certificate"], "global-min");
    assert_eq!(json["kind"], "delta-nabla");
    assert_eq!(json["sampling"]["points"]["n"], 3);
    assert!(json["residual_el1"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn solve_is_deterministic_and_defaults_to_stdout() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "ex1.json", &example(2.0, 3.0));
    let a = tscv(&["solve", s(&file)]);
    let b = tscv(&["solve", s(&file)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let y3: f64 = rows(&stdout(&a))[2][1].parse().unwrap();
    assert!((y3 - 36.0 / 47.0).abs() < 1e-9);
}

#[test]
fn toml_interval_and_directional_problems() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "dir.toml",
        r#"
kind = "directional"
u = -1
lagrangian = "t*v^2"
[timescale]
points = [1, 3, 4]
[boundary]
alpha = 0
beta = 1
"#,
    );
    let report = dir.path().join("r.json");
    let o = tscv(&["solve", s(&file), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let y3: f64 = rows(&stdout(&o))[2][1].parse().unwrap();
    assert!((y3 - 8.0 / 11.0).abs() < 1e-9);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["certificate"], "global-max");
    assert_eq!(json["u"], -1.0);
    assert!(json["directional_residual"].as_f64().unwrap() <= 1e-10);

    let file = write(
        &dir,
        "line.toml",
        r#"
kind = "delta-nabla"
gamma1 = 1
gamma2 = 0
lagrangian = "v^2"
[timescale.interval]
a = 0
b = 1
n = 11
[boundary]
alpha = 0
beta = 2
"#,
    );
    let o = tscv(&["solve", s(&file), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = rows(&stdout(&o));
    assert_eq!(table.len(), 12);
    let y: f64 = table[6][1].parse().unwrap();
    assert!((y - 1.0).abs() < 1e-12);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["sampling"]["interval"]["n"], 11);
}

#[test]
fn input_errors_exit_1_and_name_the_key() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (example(1.0, 1.0).replace(r#", "beta": 1"#, ""), "boundary.beta"),
        (example(0.0, 0.0), "gamma1, gamma2"),
        (example(1.0, 1.0).replace("[1, 3, 4]", "[1, 4, 3]"), "timescale.points"),
        (example(1.0, 1.0).replace("t*v^2", "t*v^"), "lagrangian_delta"),
        ("{ not json".to_string(), "invalid problem file"),
    ];
    for (k, (body, key)) in cases.iter().enumerate() {
        let file = write(&dir, &format!("bad{k}.json"), body);
        let o = tscv(&["solve", s(&file)]);
        assert_eq!(code(&o), 1, "case {k}");
        assert!(stderr(&o).contains(key), "case {k}: {}", stderr(&o));
    }
    let o = tscv(&["solve", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing.json"));
}

#[test]
fn torture_problem_exits_2_with_converged_false() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "torture.json",
        r#"{
  "timescale": {"interval": {"a": 0, "b": 3, "n": 8}},
  "kind": "delta-nabla",
  "gamma1": 1, "gamma2": 1,
  "lagrangian": "sin(10*y)*v^2",
  "boundary": {"alpha": 0, "beta": 5},
  "solver": {"max_iter": 3}
}"#,
    );
    let report = dir.path().join("r.json");
    let o = tscv(&["solve", s(&file), "--report", s(&report)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["converged"], false);
    assert_eq!(json["max_iter"], 3);
}

#[test]
fn identities_pass_and_are_reproducible() {
    let a = tscv(&["identities", "--seed", "11", "--trials", "50"]);
    let b = tscv(&["identities", "--seed", "11", "--trials", "50"]);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains("FAIL"));
    for family in ["integration by parts", "endpoint splitting"] {
        assert!(text.to_lowercase().contains(family), "{text}");
    }

    let o = tscv(&["identities", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn check_accepts_extremal_and_rejects_straight_line() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "ex1.json", &example(1.0, 1.0));
    let good = write(&dir, "good.csv", &format!("t,y\n1,0\n3,{}\n4,1\n", 7.0 / 9.0));
    let o = tscv(&["check", s(&file), s(&good)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("probe pass"));
    assert!(stdout(&o).contains("certificate global-min"));

    // solve output feeds back into check unchanged
    let out = dir.path().join("y.csv");
    assert_eq!(code(&tscv(&["solve", s(&file), "--out", s(&out)])), 0);
    assert_eq!(code(&tscv(&["check", s(&file), s(&out)])), 0);

    let line = write(&dir, "line.csv", &format!("t,y\n1,0\n3,{}\n4,1\n", 2.0 / 3.0));
    let o = tscv(&["check", s(&file), s(&line)]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("stationary: no"));
}

#[test]
fn check_constant_for_y_independent_lagrangian() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "flat.json",
        r#"{"timescale": {"points": [0, 0.5, 2, 2.25, 7]}, "kind": "delta-nabla",
            "gamma1": 1, "gamma2": 2, "lagrangian": "t*v^2 + v^4",
            "boundary": {"alpha": 3, "beta": 3}}"#,
    );
    let traj = write(&dir, "c.csv", "t,y\n0,3\n0.5,3\n2,3\n2.25,3\n7,3\n");
    let o = tscv(&["check", s(&file), s(&traj)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn check_reports_mismatches() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "ex1.json", &example(1.0, 1.0));
    let cases = [
        ("t,y\n1,0\n4,1\n", "2 rows"),
        ("t,y\n1,0\n3.5,0.5\n4,1\n", "t = 3.5"),
        ("t,y\n1,0.5\n3,0.7\n4,1\n", "boundary.alpha"),
        ("t,y\n1,0\n3,0.7\n4,2\n", "boundary.beta"),
        ("t,z\n1,0\n3,0.7\n4,1\n", "`y`"),
        ("t,y\n1,0\n3,abc\n4,1\n", "row 2"),
    ];
    for (k, (body, needle)) in cases.iter().enumerate() {
        let traj = write(&dir, &format!("bad{k}.csv"), body);
        let o = tscv(&["check", s(&file), s(&traj)]);
        assert_eq!(code(&o), 1, "case {k}");
        assert!(stderr(&o).contains(needle), "case {k}: {}", stderr(&o));
    }
}
