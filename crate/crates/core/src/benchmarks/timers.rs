//! Two coupled timers with controlled resets, to be desynchronized.

use crate::benchmarks::{feedback, sampler, uniform, unknown_key, Benchmark, Params, ReferenceLaws};
use crate::clf::{Bounds, Clf, FeasibleSet, FlowRegime};
use crate::error::{Error, Result};
use crate::hybrid::HybridSystem;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimersParams<T> {
    pub tau_bar: T,
    pub eps: T,
}

impl<T: Scalar> Default for TimersParams<T> {
    fn default() -> Self {
        Self {
            tau_bar: T::one(),
            eps: T::lit(-0.5),
        }
    }
}

impl<T: Scalar> Params for TimersParams<T> {
    const KEYS: &'static [&'static str] = &["tau_bar", "eps"];

    fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "tau_bar" => self.tau_bar = T::lit(value),
            "eps" => self.eps = T::lit(value),
            _ => return Err(unknown_key("timers", key)),
        }
        Ok(())
    }
}

impl<T: Scalar> TimersParams<T> {
    /// Target separation `k = (ε + 1)/(ε + 2) τ̄`.
    pub fn k(&self) -> T {
        (self.eps + T::one()) / (self.eps + T::lit(2.0)) * self.tau_bar
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_bar > T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("tau_bar = {} must be positive", self.tau_bar)));
        }
        if !(self.eps > -T::one() && self.eps < T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("eps = {} must lie in (-1, 0)", self.eps)));
        }
        Ok(())
    }
}

/// `min{|x2 − x1 + k|, |x2 − x1 − k|}`
pub fn lyapunov<T: Scalar>(k: T, x: &[T]) -> T {
    let d = x[1] - x[0];
    (d + k).abs().min((d - k).abs())
}

fn in_box<T: Scalar>(tau: T, x: &[T]) -> T {
    x[0].min(x[1]).min(tau - x[0]).min(tau - x[1])
}

/// Signed membership of `{max(x1, x2) >= τ̄}` above the positive quadrant.
fn expiry_region<T: Scalar>(tau: T, x: &[T]) -> T {
    (x[0].max(x[1]) - tau).min(x[0].min(x[1]))
}

/// Values of one timer at a jump; input reset listed before the scaling branch.
fn component<T: Scalar>(p: &TimersParams<T>, own: T, other: T, input: T, tol: T) -> Vec<T> {
    let own_expired = (own - p.tau_bar).abs() <= tol;
    let other_expired = (other - p.tau_bar).abs() <= tol;
    let scaled = (T::one() + p.eps) * own;
    match (own_expired, other_expired) {
        (true, true) => vec![input, scaled],
        (true, false) => vec![input],
        (false, true) => vec![scaled],
        (false, false) => vec![own],
    }
}

pub fn make_timers<T: Scalar>(p: TimersParams<T>) -> Result<Benchmark<T>> {
    p.validate()?;
    let tau = p.tau_bar;
    let k = p.k();
    let tol = T::lit(1e-9);
    let eq_tol = tol * T::one().max(tau);
    let full = FeasibleSet::Box(Bounds::new(vec![T::zero(); 2], vec![tau; 2]));
    let psi_set = full.clone();
    let system = HybridSystem::<T>::builder(2, 0, 2)
        .flow_map(|_, _| vec![T::one(), T::one()])
        .jump_map(move |x, u| {
            let first = component(&p, x[0], x[1], u[0], eq_tol);
            let second = component(&p, x[1], x[0], u[1], eq_tol);
            first
                .iter()
                .flat_map(|a| second.iter().map(move |b| vec![*a, *b]))
                .collect()
        })
        .flow_guard(move |x, _| in_box(tau, x))
        .jump_guard(move |x, u| expiry_region(tau, x).min(in_box(tau, u)))
        .flow_region(move |x| in_box(tau, x))
        .jump_region(move |x| expiry_region(tau, x))
        .input_space_d(full)
        .psi_d(move |x| {
            if expiry_region(tau, x) >= -tol {
                psi_set.clone()
            } else {
                FeasibleSet::Empty
            }
        })
        .guard_tol(tol)
        .build()?;

    let smooth_tol = T::lit(1e-12);
    let clf = Clf::builder(
        move |x: &[T]| lyapunov(k, x),
        move |x: &[T]| {
            let d = x[1] - x[0];
            let s = if d.abs() > k { d.signum() } else { -d.signum() };
            vec![-s, s]
        },
    )
    .alpha1(|s| s)
    .alpha2(|s| s)
    .alpha3(move |s| -p.eps * s)
    .dist_to_target(move |x: &[T]| lyapunov(k, x))
    .smoothness_region(move |x: &[T]| {
        let d = (x[1] - x[0]).abs();
        d > smooth_tol && (d - k).abs() > smooth_tol
    })
    .flow_regime(FlowRegime::Neutral)
    .build();

    Ok(Benchmark {
        name: "timers",
        system,
        clf,
        reference: ReferenceLaws {
            flow: feedback(|_: &[T]| vec![]),
            jump: feedback(|_: &[T]| vec![T::zero(), T::zero()]),
        },
        rest: ReferenceLaws {
            flow: feedback(|_: &[T]| vec![]),
            jump: feedback(|_: &[T]| vec![T::zero(), T::zero()]),
        },
        verify_lower: vec![T::zero(), T::zero()],
        verify_upper: vec![tau, tau],
        verify_exclude: None,
        flow_sampler: None,
        jump_sampler: Some(sampler(move |rng| {
            let s = uniform(rng, T::zero(), tau * T::lit(0.999));
            if uniform(rng, T::zero(), T::one()) < T::lit(0.5) {
                vec![tau, s]
            } else {
                vec![s, tau]
            }
        })),
        default_x0: vec![T::lit(0.2), T::lit(0.7)],
        default_r: T::lit(1e-6),
    })
}
