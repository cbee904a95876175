//! The four subcommands. Each writes human-readable lines to `out` and returns an exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use hybrid_minnorm::clf::format_input;
use hybrid_minnorm::{
    admissible_set, check_min_norm, min_norm_select, simulate, verify_clf, AdmissibleMode, BenchmarkF64,
    ControllerMode, Error, FeasibleSetF64, MinNormController, MinNormControllerF64, Side, SimOptions, SolverConfig, Termination,
};

use crate::config::{ModeKind, RunConfig};
use crate::output::{real, write_report, write_trajectory};
use crate::{CliError, EXIT_FAILED, EXIT_INFEASIBLE, EXIT_OK};

fn controller(cfg: &RunConfig, b: &BenchmarkF64) -> Result<MinNormControllerF64, CliError> {
    let r = cfg.r.unwrap_or(b.default_r);
    let mode = match cfg.mode {
        ModeKind::Practical => ControllerMode::Practical { r },
        ModeKind::Global => b.global_mode(),
        ModeKind::Common => ControllerMode::CommonPractical { r },
    };
    let solver = SolverConfig {
        seed: cfg.seed,
        ..SolverConfig::default()
    };
    MinNormController::new(&b.system, &b.clf, mode, solver).map_err(|e| CliError::Config {
        key: "controller.mode".into(),
        message: e.to_string(),
    })
}

fn check_dim(key: &str, x: &[f64], n: usize) -> Result<(), CliError> {
    if x.len() != n {
        return Err(CliError::Usage(format!("{key} has {} components, system state has {n}", x.len())));
    }
    Ok(())
}

fn out_path(cfg: &RunConfig, default: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// Simulates the closed loop and writes the trajectory CSV.
pub fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let b = cfg.benchmark()?;
    let x0 = cfg.x0.clone().unwrap_or_else(|| b.default_x0.clone());
    check_dim("x0", &x0, b.system.state_dim())?;
    let ctl = controller(cfg, &b)?;
    let r = match cfg.mode {
        ModeKind::Global => cfg.r.unwrap_or(0.0),
        _ => cfg.r.unwrap_or(b.default_r),
    };
    let opts = SimOptions {
        dt: cfg.dt,
        max_t: cfg.max_t(),
        max_j: cfg.max_j,
        r,
        priority: cfg.priority,
        event_tol: cfg.event_tol,
    };
    let traj = simulate(&b.system, &ctl, &x0, &opts)?;
    let path = out_path(cfg, "trajectory.csv");
    let file = BufWriter::new(File::create(&path)?);
    write_trajectory(file, &traj, b.system.state_dim(), b.system.input_dim(Side::Jump))?;

    let last = traj.final_sample();
    writeln!(out, "system: {}", b.name)?;
    writeln!(out, "termination: {}", traj.termination)?;
    if let Some(d) = &traj.detail {
        writeln!(out, "detail: {d}")?;
    }
    writeln!(out, "final_t: {}", real(last.t))?;
    writeln!(out, "final_j: {}", last.j)?;
    writeln!(out, "final_V: {}", real(last.v))?;
    writeln!(out, "samples: {}", traj.samples.len())?;
    writeln!(out, "output: {}", path.display())?;
    Ok(match traj.termination {
        Termination::ReachedSublevel | Termination::MaxFlowTime => EXIT_OK,
        Termination::Infeasible => EXIT_INFEASIBLE,
        Termination::MaxJumps | Termination::LeftCUnionD => EXIT_FAILED,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyArgs {
    pub grid_n: usize,
    pub tol: f64,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        Self { grid_n: 100, tol: 1e-7 }
    }
}

fn emit(out: &mut dyn Write, lines: &[(String, String)]) -> Result<(), CliError> {
    for (k, v) in lines {
        writeln!(out, "{k},{v}")?;
    }
    Ok(())
}

/// Grid check of the CLF inequalities over the benchmark's bounding box.
pub fn cmd_verify_clf(cfg: &RunConfig, args: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.grid_n < 2 {
        return Err(CliError::Usage("grid-n must be at least 2".into()));
    }
    if !(args.tol >= 0.0) {
        return Err(CliError::Usage("tol must be nonnegative".into()));
    }
    let b = cfg.benchmark()?;
    let rep = verify_clf(&b.system, &b.clf, &b.grid_plan(args.grid_n), args.tol);
    let mut lines = vec![
        ("system".to_string(), b.name.to_string()),
        ("grid_n".to_string(), args.grid_n.to_string()),
        ("tol".to_string(), real(args.tol)),
    ];
    lines.extend(rep.to_lines());
    lines.push(("passed".into(), rep.passed().to_string()));
    write_report(&out_path(cfg, "verify_clf.csv"), &lines)?;
    emit(out, &lines)?;
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckArgs {
    pub samples: usize,
    pub oracle_samples: usize,
}

impl Default for CheckArgs {
    fn default() -> Self {
        Self {
            samples: 1000,
            oracle_samples: 20_000,
        }
    }
}

/// Compares the synthesized laws against the oracle and the registered reference laws.
pub fn cmd_check_minnorm(cfg: &RunConfig, args: CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    if args.oracle_samples == 0 {
        return Err(CliError::Usage("oracle-samples must be at least 1".into()));
    }
    let b = cfg.benchmark()?;
    let ctl = controller(cfg, &b)?;
    let plan = b.check_plan(args.samples, args.oracle_samples, cfg.seed);
    let rep = check_min_norm(&ctl, &plan)?;
    let mut lines = vec![
        ("system".to_string(), b.name.to_string()),
        ("samples".to_string(), args.samples.to_string()),
        ("oracle_samples".to_string(), args.oracle_samples.to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
    ];
    lines.extend(rep.to_lines());
    write_report(&out_path(cfg, "check_minnorm.csv"), &lines)?;
    emit(out, &lines)?;
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleArgs {
    pub x: Vec<f64>,
    pub side: Side,
}

pub fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "flow" | "c" => Ok(Side::Flow),
        "jump" | "d" => Ok(Side::Jump),
        other => Err(format!("unknown side '{other}' (expected flow or jump)")),
    }
}

/// Textual form of a resolved admissible set using the side's input name.
pub fn describe(set: &FeasibleSetF64, side: Side, m: usize) -> String {
    let name = match side {
        Side::Flow => "u_c",
        Side::Jump => "u_d",
    };
    let text = set.to_string();
    if m == 1 {
        text.replace("u[0]", name)
    } else {
        text.replace("u[", &format!("{name}["))
    }
}

/// Prints Ψ, the admissible set and its minimum-norm element at one state.
pub fn cmd_feasible_set(cfg: &RunConfig, args: &FeasibleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let b = cfg.benchmark()?;
    check_dim("x", &args.x, b.system.state_dim())?;
    let side = args.side;
    if !b.system.in_projection(side, &args.x) {
        return Err(Error::OutOfDomain {
            side,
            x: args.x.clone(),
            reason: "x is not in the projection of the set onto the state space",
        }
        .into());
    }
    let m = b.system.input_dim(side);
    let psi = b.system.feasible_inputs(side, &args.x)?;
    let t = admissible_set(&b.system, &b.clf, side, &args.x, AdmissibleMode::Pointwise)?;
    let solver = SolverConfig {
        seed: cfg.seed,
        ..SolverConfig::default()
    };
    let resolved = t.resolve(solver.feas_tol);
    writeln!(out, "side: {side}")?;
    writeln!(out, "psi: {}", describe(&psi, side, m))?;
    writeln!(out, "admissible: {}", describe(&t, side, m))?;
    match min_norm_select(&t, &solver) {
        Ok(u) => {
            writeln!(out, "{}; min-norm = {}", describe(&resolved, side, m), format_input(&u))?;
            Ok(EXIT_OK)
        }
        Err(Error::EmptySet) => {
            writeln!(out, "Empty; no admissible input")?;
            Ok(EXIT_INFEASIBLE)
        }
        Err(e) => Err(e.into()),
    }
}
