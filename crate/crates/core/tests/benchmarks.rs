use hybrid_minnorm::*;

fn run(b: &Benchmark<f64>, r: f64, x0: &[f64], max_t: f64) -> HybridTrajectory<f64> {
    let ctl = MinNormController::practical(&b.system, &b.clf, r).unwrap();
    let opts = SimOptions {
        r,
        max_t,
        ..SimOptions::default()
    };
    simulate(&b.system, &ctl, x0, &opts).unwrap()
}

#[test]
fn rotate_reaches_sublevel_with_decreasing_v() {
    let b = make_rotate_dissipate(RotateParams::default()).unwrap();
    let traj = run(&b, 0.15, &[2.0, 0.9], 20.0);
    assert_eq!(traj.termination, Termination::ReachedSublevel, "{:?}", traj.detail);
    assert!(traj.jumps() >= 1);
    for (a, c) in traj.flow_pairs() {
        assert!(c.v <= a.v + 1e-6, "{} -> {}", a.v, c.v);
    }
    let alpha = |s: f64| b.clf.alpha3(Side::Jump, s);
    for jr in &traj.jump_log {
        let s = b.clf.dist_to_target(&jr.x_before);
        assert!(jr.v_after - jr.v_before <= -alpha(s) + 1e-9);
    }
    assert!(traj.final_sample().v <= 0.15 + 1e-9);
}

#[test]
fn pendulum_reaches_sublevel() {
    let b = make_pendulum(PendulumParams::default()).unwrap();
    let traj = run(&b, 0.0015, &[2.0, -10.0], 60.0);
    assert_eq!(traj.termination, Termination::ReachedSublevel, "{:?}", traj.detail);
    assert!(traj.jumps() >= 1);
    for (a, c) in traj.flow_pairs() {
        assert!(c.v <= a.v + 1e-6, "{} -> {}", a.v, c.v);
    }
    for jr in &traj.jump_log {
        let s = b.clf.dist_to_target(&jr.x_before);
        assert!(jr.v_after - jr.v_before <= -b.clf.alpha3(Side::Jump, s) + 1e-9);
    }
}

#[test]
fn timers_contract_geometrically() {
    let b = make_timers(TimersParams::default()).unwrap();
    let ctl = MinNormController::practical(&b.system, &b.clf, 1e-6).unwrap();
    let opts = SimOptions {
        r: 1e-6,
        max_t: 40.0,
        max_j: 25,
        ..SimOptions::default()
    };
    let traj = simulate(&b.system, &ctl, &[0.2, 0.7], &opts).unwrap();
    let x: &[f64] = &traj.final_sample().x;
    assert!(((x[1] - x[0]).abs() - 1.0 / 3.0).abs() <= 1e-3, "{:?} {:?}", x, traj.termination);
    for jr in &traj.jump_log {
        assert!(jr.v_after <= 0.5 * jr.v_before + 1e-9, "{jr:?}");
    }
}

#[test]
fn grid_verification_passes_for_all_benchmarks() {
    let all: [BenchmarkF64; 3] = [
        make_rotate_dissipate(RotateParams::default()).unwrap(),
        make_pendulum(PendulumParams::default()).unwrap(),
        make_timers(TimersParams::default()).unwrap(),
    ];
    for b in &all {
        let rep = verify_clf(&b.system, &b.clf, &b.grid_plan(100), 1e-7);
        assert!(rep.passed(), "{}: {:?}", b.name, rep.to_lines());
    }
}

#[test]
fn minnorm_check_passes_for_all_benchmarks() {
    let all: [BenchmarkF64; 3] = [
        make_rotate_dissipate(RotateParams::default()).unwrap(),
        make_pendulum(PendulumParams::default()).unwrap(),
        make_timers(TimersParams::default()).unwrap(),
    ];
    for b in &all {
        let ctl = MinNormController::practical(&b.system, &b.clf, b.default_r).unwrap();
        let rep = check_min_norm(&ctl, &b.check_plan(200, 2000, 7)).unwrap();
        assert!(rep.passed(), "{}: {:?}", b.name, rep.to_lines());
    }
}
