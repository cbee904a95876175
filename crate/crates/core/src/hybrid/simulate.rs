//! Closed-loop simulation on hybrid time.

use std::str::FromStr;

use crate::error::{Error, Result, Side};
use crate::hybrid::domain::{HybridTimeDomain, HybridTrajectory, JumpRecord, Phase, Sample, Termination};
use crate::hybrid::flow::{integrate_flow_interval, FlowExit, FlowOptions};
use crate::hybrid::HybridSystem;
use crate::linalg::all_finite;
use crate::Scalar;

/// Tie-break on C ∩ D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Priority {
    #[default]
    Jump,
    Flow,
}

impl FromStr for Priority {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jump" => Ok(Priority::Jump),
            "flow" => Ok(Priority::Flow),
            other => Err(Error::InvalidArgument(format!("unknown priority '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions<T> {
    pub dt: T,
    pub max_t: T,
    pub max_j: usize,
    /// Sublevel to stop at; `0` disables the stop.
    pub r: T,
    pub priority: Priority,
    pub event_tol: T,
}

impl<T: Scalar> Default for SimOptions<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(1e-3),
            max_t: T::lit(20.0),
            max_j: 100,
            r: T::zero(),
            priority: Priority::Jump,
            event_tol: T::lit(1e-10),
        }
    }
}

/// State-feedback pair plus the Lyapunov function the simulator records.
pub trait ClosedLoopControl<T: Scalar> {
    fn flow_input(&self, x: &[T]) -> Result<Vec<T>>;
    fn jump_input(&self, x: &[T]) -> Result<Vec<T>>;
    fn lyapunov_value(&self, x: &[T]) -> T;
}

fn infeasible(traj: &mut HybridTrajectory<impl Scalar>, e: Error) {
    traj.termination = Termination::Infeasible;
    traj.detail = Some(e.to_string());
}

/// Simulates the closed loop from `x0`. When `opts.r > 0` the run is restricted to
/// `{V >= r}` and ends with `ReachedSublevel` once `V <= r`.
pub fn simulate<T: Scalar, K: ClosedLoopControl<T> + ?Sized>(
    sys: &HybridSystem<T>,
    controller: &K,
    x0: &[T],
    opts: &SimOptions<T>,
) -> Result<HybridTrajectory<T>> {
    if x0.len() != sys.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.state_dim(),
            got: x0.len(),
        });
    }
    if !(opts.r >= T::zero()) {
        return Err(Error::InvalidArgument("r must be nonnegative".into()));
    }
    let sublevel = |x: &[T]| opts.r > T::zero() && controller.lyapunov_value(x) <= opts.r;
    if !sublevel(x0) && !sys.in_projection(Side::Flow, x0) && !sys.in_projection(Side::Jump, x0) {
        return Err(Error::OutOfDomain {
            side: Side::Flow,
            x: crate::error::to_f64s(x0),
            reason: "initial state is outside the projections of C and D",
        });
    }

    let mut traj = HybridTrajectory {
        domain: HybridTimeDomain::starting_at(T::zero()),
        samples: vec![Sample {
            t: T::zero(),
            j: 0,
            x: x0.to_vec(),
            u_c: None,
            v: controller.lyapunov_value(x0),
            phase: Phase::Flow,
        }],
        jump_log: vec![],
        termination: Termination::LeftCUnionD,
        detail: None,
    };
    let mut x = x0.to_vec();
    let mut t = T::zero();
    let mut j = 0usize;
    let mut blocked = false;

    loop {
        if sublevel(&x) {
            traj.termination = Termination::ReachedSublevel;
            break;
        }
        let can_jump = sys.in_projection(Side::Jump, &x);
        let mut can_flow = !blocked && sys.in_projection(Side::Flow, &x);
        if can_flow {
            match controller.flow_input(&x) {
                Ok(u) => can_flow = sys.in_set(Side::Flow, &x, &u),
                Err(Error::OutOfDomain { .. }) => can_flow = false,
                Err(e @ Error::Infeasible { .. }) if !can_jump => {
                    infeasible(&mut traj, e);
                    break;
                }
                Err(Error::Infeasible { .. }) => can_flow = false,
                Err(e) => return Err(e),
            }
        }
        let jump_now = can_jump && (opts.priority == Priority::Jump || !can_flow);

        if jump_now {
            if j >= opts.max_j {
                traj.termination = Termination::MaxJumps;
                break;
            }
            let u_d = match controller.jump_input(&x) {
                Ok(u) if sys.in_set(Side::Jump, &x, &u) => Some(u),
                Ok(_) | Err(Error::OutOfDomain { .. }) => None,
                Err(e @ Error::Infeasible { .. }) => {
                    infeasible(&mut traj, e);
                    break;
                }
                Err(e) => return Err(e),
            };
            if let Some(u_d) = u_d {
                let values = sys.jumps(&x, &u_d);
                let x_after = values.into_iter().next().ok_or_else(|| {
                    Error::InvalidArgument("jump map returned an empty value set".into())
                })?;
                if !all_finite(&x_after) {
                    return Err(Error::NonFiniteState { t: t.as_f64() });
                }
                let v_before = controller.lyapunov_value(&x);
                let v_after = controller.lyapunov_value(&x_after);
                match traj.samples.last_mut() {
                    Some(last) if last.j == j && last.t == t => last.phase = Phase::JumpPre,
                    _ => traj.samples.push(Sample {
                        t,
                        j,
                        x: x.clone(),
                        u_c: None,
                        v: v_before,
                        phase: Phase::JumpPre,
                    }),
                }
                traj.jump_log.push(JumpRecord {
                    t,
                    j,
                    x_before: x.clone(),
                    u_d,
                    x_after: x_after.clone(),
                    v_before,
                    v_after,
                });
                j += 1;
                traj.domain.push_jump();
                traj.samples.push(Sample {
                    t,
                    j,
                    x: x_after.clone(),
                    u_c: None,
                    v: v_after,
                    phase: Phase::JumpPost,
                });
                x = x_after;
                blocked = false;
                continue;
            }
        }

        if !can_flow {
            traj.termination = Termination::LeftCUnionD;
            break;
        }
        if t >= opts.max_t {
            traj.termination = Termination::MaxFlowTime;
            break;
        }
        let flow_opts = FlowOptions {
            dt: opts.dt,
            max_t: opts.max_t - t,
            event_tol: opts.event_tol,
            jump_stops: opts.priority == Priority::Jump,
        };
        let mut control = |z: &[T]| controller.flow_input(z);
        let seg = match integrate_flow_interval(sys, &mut control, &x, t, &flow_opts, &sublevel) {
            Ok(seg) => seg,
            Err(e @ Error::Infeasible { .. }) => {
                infeasible(&mut traj, e);
                break;
            }
            Err(e) => return Err(e),
        };
        let mut iter = seg.samples.into_iter();
        if let Some((_, _, u_first)) = iter.next() {
            if let Some(last) = traj.samples.last_mut() {
                last.u_c = Some(u_first);
            }
        }
        for (ts, xs, us) in iter {
            let v = controller.lyapunov_value(&xs);
            traj.samples.push(Sample {
                t: ts,
                j,
                x: xs,
                u_c: Some(us),
                v,
                phase: Phase::Flow,
            });
        }
        t = seg.exit_time;
        x = seg.exit_state;
        traj.domain.extend_to(t);
        match seg.exit {
            FlowExit::MaxFlowTime => {
                traj.termination = Termination::MaxFlowTime;
                break;
            }
            FlowExit::LeftFlowSet => blocked = true,
            FlowExit::JumpEvent | FlowExit::StopPredicate => blocked = false,
        }
    }
    Ok(traj)
}
