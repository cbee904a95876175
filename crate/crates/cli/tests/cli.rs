use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybrid-minnorm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Rows {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Rows {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    Rows { header, rows }
}

impl Rows {
    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap()
    }

    fn values(&self, name: &str) -> Vec<f64> {
        let i = self.col(name);
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

#[test]
fn simulate_rotate_reaches_sublevel() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["simulate", "--system", "rotate", "--x0", "2,0.9", "--r", "0.15", "--out", "traj.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("termination: ReachedSublevel"));
    let csv = read_csv(&dir.path().join("traj.csv"));
    assert_eq!(csv.header, ["t", "j", "x0", "x1", "V", "phase", "ud0"]);
    let v = csv.values("V");
    assert!(*v.last().unwrap() <= 0.15 + 1e-9);
    assert!(v.iter().all(|v| v.is_finite() && *v >= 0.0));
    let phase = csv.col("phase");
    let ud = csv.col("ud0");
    for r in &csv.rows {
        assert_eq!(r.len(), csv.header.len());
        match r[phase].as_str() {
            "flow" => assert!(r[ud].is_empty()),
            "jump_pre" | "jump_post" => assert!(r[ud].parse::<f64>().is_ok()),
            other => panic!("bad phase {other}"),
        }
    }
    assert!(csv.rows.iter().any(|r| r[phase] == "jump_post"));
}

#[test]
fn simulate_pendulum_v_nonincreasing() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["simulate", "--system", "pendulum", "--x0", "2,-10", "--r", "0.0015", "--out", "p.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_csv(&dir.path().join("p.csv")).values("V");
    for w in v.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn simulate_inside_sublevel_is_single_row() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["simulate", "--system", "rotate", "--x0", "0,0", "--r", "0.15", "--out", "z.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ReachedSublevel"));
    assert_eq!(read_csv(&dir.path().join("z.csv")).rows.len(), 1);
}

#[test]
fn synchronized_timers_are_infeasible() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["simulate", "--system", "timers", "--x0", "0.5,0.5", "--out", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("termination: Infeasible"));
}

#[test]
fn verify_timers_skips_flow() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["verify-clf", "--system", "timers", "--grid-n", "50", "--out", "v.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(report.contains("flow_status,skipped (nonsmooth/neutral)"));
    assert!(report.contains("jump_violations,0"));
}

#[test]
fn verify_rejects_broken_rotate() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["verify-clf", "--system", "rotate", "--param", "gamma=1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("construction refused"));
}

#[test]
fn verify_grid_too_small() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["verify-clf", "--system", "rotate", "--grid-n", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_zero_samples_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["check-minnorm", "--system", "rotate", "--samples", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("usage"));
}

#[test]
fn check_small_run_passes() {
    let dir = TempDir::new().unwrap();
    let o = bin(
        &["check-minnorm", "--system", "pendulum", "--samples", "50", "--oracle-samples", "2000", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(report.lines().all(|l| l.split(',').count() == 2));
    assert!(report.contains("passed,true"));
}

#[test]
fn feasible_set_descriptions() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["feasible-set", "--system", "rotate", "--x", "1,1", "--side", "flow"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Finite{+1}; min-norm = +1"), "{}", stdout(&o));

    let o = bin(&["feasible-set", "--system", "rotate", "--x", "1,-1", "--side", "jump"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("singleton u_d = 0.141421"), "{}", stdout(&o));

    let o = bin(&["feasible-set", "--system", "rotate", "--x", "5,5", "--side", "jump"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("outside the domain"));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "system = rotate\nsolver.bogus = 3\n").unwrap();
    let o = bin(&["simulate", "--config", "run.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("solver.bogus"));
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "system = rotate\ncontroller.r = 5\noutput.path = from_file.csv\n# overridden below\n",
    )
    .unwrap();
    let o = bin(&["simulate", "--config", "run.cfg", "--r", "0.15", "--out", "flag.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("flag.csv").exists());
    assert!(!dir.path().join("from_file.csv").exists());
    let v = read_csv(&dir.path().join("flag.csv")).values("V");
    assert!(*v.last().unwrap() < 1.0);
}

#[test]
fn parameter_for_wrong_system_is_named() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["simulate", "--system", "timers", "--param", "gamma=0.2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("system.gamma"));
}

#[test]
fn bad_flag_exits_with_config_code() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["simulate", "--bogus", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
