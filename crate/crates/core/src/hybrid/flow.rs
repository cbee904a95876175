//! Fixed-step flow integration with bisection-located events.

use crate::error::{Error, Result, Side};
use crate::hybrid::HybridSystem;
use crate::linalg::{all_finite, axpy};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions<T> {
    pub dt: T,
    /// Maximum duration of this interval.
    pub max_t: T,
    pub event_tol: T,
    /// Stop the interval when the state enters Π(D).
    pub jump_stops: bool,
}

impl<T: Scalar> Default for FlowOptions<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(1e-3),
            max_t: T::lit(10.0),
            event_tol: T::lit(1e-10),
            jump_stops: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowExit {
    JumpEvent,
    LeftFlowSet,
    StopPredicate,
    MaxFlowTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSegment<T> {
    /// `(t, x, u_c)` at every step; the last entry is the exit state.
    pub samples: Vec<(T, Vec<T>, Vec<T>)>,
    pub exit: FlowExit,
    pub exit_state: Vec<T>,
    pub exit_time: T,
}

struct Stepper<'a, T: Scalar> {
    sys: &'a HybridSystem<T>,
    control: &'a mut dyn FnMut(&[T]) -> Result<Vec<T>>,
    last_u: Vec<T>,
}

impl<T: Scalar> Stepper<'_, T> {
    /// Control value; outside the law's domain the previous input is held.
    fn input(&mut self, x: &[T]) -> Result<Vec<T>> {
        match (self.control)(x) {
            Ok(u) => {
                self.last_u = u.clone();
                Ok(u)
            }
            Err(Error::OutOfDomain { .. }) => Ok(self.last_u.clone()),
            Err(e) => Err(e),
        }
    }

    fn field(&mut self, x: &[T]) -> Result<Vec<T>> {
        let u = self.input(x)?;
        Ok(self.sys.flow(x, &u))
    }

    /// One classical RK4 step given the first stage.
    fn rk4_from(&mut self, x: &[T], k1: &[T], h: T) -> Result<Vec<T>> {
        let two = T::lit(2.0);
        let half = h / two;
        let k2 = self.field(&axpy(x, half, k1))?;
        let k3 = self.field(&axpy(x, half, &k2))?;
        let k4 = self.field(&axpy(x, h, &k3))?;
        let six = T::lit(6.0);
        Ok(x.iter()
            .enumerate()
            .map(|(i, xi)| *xi + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
            .collect())
    }
}

#[derive(Clone, Copy, Default)]
struct Fired {
    stop: bool,
    jump: bool,
    exit: bool,
}

impl Fired {
    fn any(self) -> bool {
        self.stop || self.jump || self.exit
    }
}

struct Events<'a, T: Scalar> {
    sys: &'a HybridSystem<T>,
    stop: &'a dyn Fn(&[T]) -> bool,
    exit_level: T,
    jump_armed: bool,
    jump_stops: bool,
}

impl<T: Scalar> Events<'_, T> {
    fn left_flow(&self, x: &[T]) -> bool {
        self.sys.region(Side::Flow, x) < self.exit_level
    }

    fn in_jump(&self, x: &[T]) -> bool {
        self.sys.region(Side::Jump, x) >= T::zero()
    }

    fn check(&self, x: &[T]) -> Fired {
        Fired {
            stop: (self.stop)(x),
            jump: self.jump_stops && self.jump_armed && self.in_jump(x),
            exit: self.left_flow(x),
        }
    }
}

/// Counts sign changes of a boolean sequence.
fn toggles(seq: &[bool]) -> usize {
    seq.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Cubic Hermite interpolant on one step.
fn hermite<T: Scalar>(x0: &[T], f0: &[T], x1: &[T], f1: &[T], h: T, s: T) -> Vec<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = two * s3 - three * s2 + one;
    let h10 = s3 - two * s2 + s;
    let h01 = -two * s3 + three * s2;
    let h11 = s3 - s2;
    (0..x0.len())
        .map(|i| h00 * x0[i] + h10 * h * f0[i] + h01 * x1[i] + h11 * h * f1[i])
        .collect()
}

/// Integrates the closed-loop flow `ẋ = f(x, control(x))` from `x0` at time `t0`.
///
/// Stops at the first of: the state enters Π(D) (when `jump_stops`), the state leaves Π(C),
/// `stop` fires, or `opts.max_t` elapses. Events are located by bisection in time to
/// `opts.event_tol`.
pub fn integrate_flow_interval<T: Scalar>(
    sys: &HybridSystem<T>,
    control: &mut dyn FnMut(&[T]) -> Result<Vec<T>>,
    x0: &[T],
    t0: T,
    opts: &FlowOptions<T>,
    stop: &dyn Fn(&[T]) -> bool,
) -> Result<FlowSegment<T>> {
    if !(opts.dt > T::zero()) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if !(opts.event_tol > T::zero()) {
        return Err(Error::InvalidArgument("event_tol must be positive".into()));
    }
    if x0.len() != sys.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.state_dim(),
            got: x0.len(),
        });
    }
    let u0 = control(x0)?;
    if !sys.in_set(Side::Flow, x0, &u0) {
        return Err(Error::OutOfDomain {
            side: Side::Flow,
            x: crate::error::to_f64s(x0),
            reason: "flow guard is negative at the initial state",
        });
    }
    let mut stepper = Stepper {
        sys,
        control,
        last_u: u0.clone(),
    };
    let mut events = Events {
        sys,
        stop,
        exit_level: sys.region(Side::Flow, x0).min(T::zero()),
        jump_armed: false,
        jump_stops: opts.jump_stops,
    };
    events.jump_armed = !events.in_jump(x0);

    let mut samples = vec![(t0, x0.to_vec(), u0)];
    let mut x = x0.to_vec();
    let mut f_start = stepper.field(&x)?;
    let mut k: usize = 0;
    let t_final = t0 + opts.max_t;
    let tiny = T::epsilon() * T::lit(16.0) * t_final.abs().max(T::one());
    loop {
        let t = t0 + T::from_usize(k).unwrap() * opts.dt;
        let remaining = t_final - t;
        if remaining <= tiny {
            let t_exit = samples.last().unwrap().0;
            return Ok(FlowSegment {
                exit: FlowExit::MaxFlowTime,
                exit_state: x,
                exit_time: t_exit,
                samples,
            });
        }
        let h = opts.dt.min(remaining);
        let x_next = stepper.rk4_from(&x, &f_start, h)?;
        if !all_finite(&x_next) {
            return Err(Error::NonFiniteState {
                t: (t + h).as_f64(),
            });
        }
        let fired = events.check(&x_next);

        // sign pattern at interpolated quarter steps
        let f_end = stepper.field(&x_next)?;
        let probes: Vec<Vec<T>> = (1..4)
            .map(|q| hermite(&x, &f_start, &x_next, &f_end, h, T::from_usize(q).unwrap() / T::lit(4.0)))
            .collect();
        let exit_seq: Vec<bool> = std::iter::once(false)
            .chain(probes.iter().map(|p| events.left_flow(p)))
            .chain(std::iter::once(fired.exit))
            .collect();
        if toggles(&exit_seq) > 1 {
            return Err(Error::StepTooLarge { dt: opts.dt.as_f64() });
        }
        if events.jump_stops && events.jump_armed {
            let jump_seq: Vec<bool> = std::iter::once(false)
                .chain(probes.iter().map(|p| events.in_jump(p)))
                .chain(std::iter::once(fired.jump))
                .collect();
            if toggles(&jump_seq) > 1 {
                return Err(Error::StepTooLarge { dt: opts.dt.as_f64() });
            }
        }

        if fired.any() {
            let (mut lo, mut hi) = (T::zero(), h);
            let mut x_lo = x.clone();
            let mut x_hi = x_next;
            let mut hit = fired;
            while hi - lo > opts.event_tol {
                let mid = (lo + hi) / T::lit(2.0);
                let xm = stepper.rk4_from(&x, &f_start, mid)?;
                let fm = events.check(&xm);
                if fm.any() {
                    hi = mid;
                    x_hi = xm;
                    hit = fm;
                } else {
                    lo = mid;
                    x_lo = xm;
                }
            }
            let (exit, exit_state, exit_time) = if hit.stop {
                (FlowExit::StopPredicate, x_hi, t + hi)
            } else if hit.jump {
                (FlowExit::JumpEvent, x_hi, t + hi)
            } else {
                (FlowExit::LeftFlowSet, x_lo, t + lo)
            };
            let u = stepper.input(&exit_state)?;
            if exit_time > samples.last().unwrap().0 {
                samples.push((exit_time, exit_state.clone(), u));
            }
            return Ok(FlowSegment {
                samples,
                exit,
                exit_state,
                exit_time,
            });
        }

        if !events.jump_armed && !events.in_jump(&x_next) {
            events.jump_armed = true;
        }
        x = x_next;
        f_start = f_end;
        k += 1;
        let t_now = if h < opts.dt { t_final } else { t0 + T::from_usize(k).unwrap() * opts.dt };
        let u = stepper.last_u.clone();
        samples.push((t_now, x.clone(), u));
        if h < opts.dt {
            return Ok(FlowSegment {
                exit: FlowExit::MaxFlowTime,
                exit_state: x,
                exit_time: t_now,
                samples,
            });
        }
    }
}
