//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hybrid_minnorm::benchmarks::pendulum::psi;
use hybrid_minnorm::linalg::{linspace, norm};
use hybrid_minnorm::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rotate() -> BenchmarkF64 {
    make_rotate_dissipate(RotateParams::default()).unwrap()
}

fn pendulum() -> BenchmarkF64 {
    make_pendulum(PendulumParams::default()).unwrap()
}

fn timers() -> BenchmarkF64 {
    make_timers(TimersParams::default()).unwrap()
}

fn run(b: &BenchmarkF64, x0: &[f64], r: f64, max_t: f64, max_j: usize) -> Result<HybridTrajectoryF64> {
    let ctl = MinNormController::practical(&b.system, &b.clf, r)?;
    let opts = SimOptions {
        dt: 1e-3,
        max_t,
        max_j,
        r,
        ..SimOptions::default()
    };
    simulate(&b.system, &ctl, x0, &opts)
}

fn flow_decrease() -> Verdict {
    let b = rotate();
    let start = Instant::now();
    let traj = match run(&b, &[2.0, 0.9], 0.15, 20.0, 100) {
        Ok(t) => t,
        Err(e) => return verdict(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut pairs = 0;
    let mut worst = f64::NEG_INFINITY;
    for (a, c) in traj.flow_pairs() {
        pairs += 1;
        worst = worst.max(c.v - a.v);
    }
    let ok = traj.termination == Termination::ReachedSublevel && pairs > 0 && worst <= 1e-6 && secs < 5.0;
    verdict(
        ok,
        format!(
            "rotate: {pairs} flow pairs, max V increase {worst:.3e} (tol 1e-6), {}, {secs:.3} s (limit 5 s)",
            traj.termination
        ),
    )
}

fn jump_decrease() -> Verdict {
    let cases = [(rotate(), vec![2.0, 0.9], 0.15, 20.0), (pendulum(), vec![2.0, -10.0], 0.0015, 60.0)];
    let mut parts = vec![];
    let mut ok = true;
    for (b, x0, r, max_t) in cases {
        let traj = match run(&b, &x0, r, max_t, 100) {
            Ok(t) => t,
            Err(e) => return verdict(false, format!("{}: {e}", b.name)),
        };
        let mut worst = f64::NEG_INFINITY;
        for jr in &traj.jump_log {
            let a3 = b.clf.alpha3(Side::Jump, b.clf.dist_to_target(&jr.x_before));
            worst = worst.max(jr.v_after - jr.v_before + a3);
        }
        ok &= !traj.jump_log.is_empty() && worst <= 1e-9;
        parts.push(format!("{}: {} jumps, max excess {worst:.3e}", b.name, traj.jumps()));
    }
    verdict(ok, format!("{} (tol 1e-9)", parts.join("; ")))
}

fn exact_jump_selection() -> Verdict {
    let b = rotate();
    let r = 0.15;
    let ctl = MinNormController::practical(&b.system, &b.clf, r).unwrap();
    let sampler = b.jump_sampler.clone().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tested = 0;
    let mut worst = 0.0f64;
    let mut errors = 0;
    let mut attempts = 0;
    while tested < 1000 && attempts < 100_000 {
        attempts += 1;
        let x = sampler(&mut rng);
        if b.clf.value(&x) <= r {
            continue;
        }
        tested += 1;
        match ctl.select_control(Side::Jump, &x) {
            Ok(u) => worst = worst.max((u[0] - 0.1 * norm(&x)).abs()),
            Err(_) => errors += 1,
        }
    }
    verdict(
        tested == 1000 && errors == 0 && worst <= 1e-12,
        format!("rotate: {tested} boundary states, {errors} errors, max |u_d - gamma|x|| = {worst:.3e} (tol 1e-12)"),
    )
}

fn pendulum_closed_form() -> Verdict {
    let b = pendulum();
    let r = 0.0015;
    let p = PendulumParams::<f64>::default();
    let lam = p.lambda();
    let ctl = MinNormController::practical(&b.system, &b.clf, r).unwrap();
    let mut positive = 0;
    let mut nonpositive = 0;
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    let mut errors = 0;
    for x1 in linspace(-std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 200) {
        for x2 in linspace(-10.0, 10.0, 200) {
            let x = [x1, x2];
            if !b.system.in_projection(Side::Flow, &x) || b.clf.value(&x) < r {
                continue;
            }
            let (psi0, psi1) = psi(&p, lam, &x);
            let Ok(u) = ctl.select_control(Side::Flow, &x) else {
                errors += 1;
                continue;
            };
            if psi0 > 0.0 {
                if psi1.abs() < 1e-3 {
                    continue;
                }
                positive += 1;
                worst = worst.max((u[0] + psi0 / psi1).abs());
            } else {
                nonpositive += 1;
                // the second input ranges over [-pi/2, min(x1, 0)]; 0 is admissible only for x1 >= 0
                let expect = [0.0, x1.min(0.0)];
                if u[0] != expect[0] || u[1] != expect[1] {
                    mismatched += 1;
                }
            }
        }
    }
    verdict(
        errors == 0 && worst <= 1e-8 && mismatched == 0 && positive > 0 && nonpositive > 0,
        format!(
            "pendulum 200x200: {positive} states with psi0>0, max |u1 + psi0/psi1| = {worst:.3e} (tol 1e-8); \
             {nonpositive} with psi0<=0, {mismatched} not equal to (0, min(x1,0)); {errors} errors"
        ),
    )
}

fn optimality() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = vec![];
    for b in [rotate(), pendulum(), timers()] {
        let ctl = MinNormController::practical(&b.system, &b.clf, b.default_r).unwrap();
        let rep = match check_min_norm(&ctl, &b.check_plan(1000, 20_000, 11)) {
            Ok(r) => r,
            Err(e) => return verdict(false, format!("{}: {e}", b.name)),
        };
        for (side, s) in [("flow", &rep.flow), ("jump", &rep.jump)] {
            let expected = match side {
                "flow" => b.flow_sampler.is_some(),
                _ => b.jump_sampler.is_some(),
            };
            if !expected {
                continue;
            }
            ok &= s.states == 1000
                && s.selection_errors == 0
                && s.optimality_violations == 0
                && s.upsilon_violations == 0
                && s.passed();
            parts.push(format!(
                "{}.{side}: {} states, {} feasible u, {} norm violations, max upsilon {:.3e}",
                b.name, s.states, s.feasible_checked, s.optimality_violations, s.max_upsilon
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    verdict(ok, format!("{}; {secs:.2} s (limit 60 s)", parts.join("; ")))
}

fn desynchronization() -> Verdict {
    let b = timers();
    let start = Instant::now();
    let traj = match run(&b, &[0.2, 0.7], 1e-6, 100.0, 25) {
        Ok(t) => t,
        Err(e) => return verdict(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let x = &traj.final_sample().x;
    let gap = ((x[1] - x[0]).abs() - 1.0 / 3.0).abs();
    let ratio = traj
        .jump_log
        .iter()
        .filter(|j| j.v_before > 0.0)
        .map(|j| j.v_after / j.v_before)
        .fold(0.0f64, f64::max);
    verdict(
        traj.jumps() <= 25 && gap <= 1e-3 && secs < 2.0,
        format!(
            "timers: {} jumps, ||x2-x1| - 1/3| = {gap:.3e} (tol 1e-3), worst V ratio per jump {ratio:.4}, {secs:.3} s (limit 2 s)",
            traj.jumps()
        ),
    )
}

fn cli(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hybrid-minnorm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn grid_verification(dir: &Path) -> Verdict {
    let mut ok = true;
    let mut parts = vec![];
    for s in ["rotate", "pendulum", "timers"] {
        let out = format!("verify_{s}.csv");
        let o = cli(&["verify-clf", "--system", s, "--grid-n", "100", "--tol", "1e-7", "--out", &out], dir);
        let code = o.status.code();
        ok &= code == Some(0);
        parts.push(format!("{s} exit {code:?}"));
    }
    let o = cli(&["verify-clf", "--system", "rotate", "--param", "gamma=1", "--grid-n", "100"], dir);
    let refused = o.status.code() == Some(1) && String::from_utf8_lossy(&o.stderr).contains("construction refused");
    ok &= refused;
    parts.push(format!("rotate gamma=1 exit {:?} (construction refused: {refused})", o.status.code()));
    verdict(ok, parts.join("; "))
}

fn determinism(dir: &Path) -> Verdict {
    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate", "--system", "rotate", "--x0", "2,0.9", "--r", "0.15"],
        vec!["simulate", "--system", "pendulum", "--x0", "2,-10", "--r", "0.0015"],
        vec!["simulate", "--system", "timers", "--x0", "0.2,0.7", "--max-j", "25"],
        vec!["verify-clf", "--system", "pendulum", "--grid-n", "100"],
        vec!["check-minnorm", "--system", "rotate", "--samples", "200", "--seed", "5"],
        vec!["check-minnorm", "--system", "pendulum", "--samples", "200", "--seed", "5"],
        vec!["check-minnorm", "--system", "timers", "--samples", "200", "--seed", "5"],
    ];
    let mut ok = true;
    let mut identical = 0;
    for (i, c) in commands.iter().enumerate() {
        let mut files = vec![];
        for run in 0..2 {
            let out = format!("det_{i}_{run}.csv");
            let mut args = c.clone();
            args.extend(["--out", out.as_str()]);
            let o = cli(&args, dir);
            if o.status.code() != Some(0) {
                return verdict(false, format!("command {:?} exited {:?}", c, o.status.code()));
            }
            files.push(std::fs::read(dir.join(&out)).unwrap());
        }
        if files[0] == files[1] && !files[0].is_empty() {
            identical += 1;
        } else {
            ok = false;
        }
    }
    verdict(ok, format!("{identical}/{} commands byte-identical across two runs", commands.len()))
}

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() {
    let dir = TempDir::new().expect("temp dir");
    let criteria: Vec<(&str, Check)> = vec![
        ("flow V-decrease", Box::new(flow_decrease)),
        ("jump decrease", Box::new(jump_decrease)),
        ("exact jump selection", Box::new(exact_jump_selection)),
        ("closed-form agreement", Box::new(pendulum_closed_form)),
        ("min-norm optimality vs oracle", Box::new(optimality)),
        ("desynchronization contraction", Box::new(desynchronization)),
        ("CLF grid verification", Box::new(|| grid_verification(dir.path()))),
        ("determinism", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
