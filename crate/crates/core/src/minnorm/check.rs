//! Seeded cross-checks of the selected laws against references and the oracle.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clf::{upsilon, FeasibleSet};
use crate::error::{Error, Result, Side};
use crate::hybrid::Feedback;
use crate::linalg::{dist, norm};
use crate::minnorm::controller::MinNormController;
use crate::minnorm::oracle::oracle_expanding;
use crate::minnorm::select::member;
use crate::Scalar;

pub type StateSampler<T> = Arc<dyn Fn(&mut ChaCha8Rng) -> Vec<T> + Send + Sync>;

#[derive(Clone)]
pub struct CheckPlan<T> {
    /// States drawn per side.
    pub samples: usize,
    pub oracle_samples: usize,
    /// Random admissible inputs compared against the selection at every state.
    pub feasible_samples: usize,
    pub seed: u64,
    pub flow_sampler: Option<StateSampler<T>>,
    pub jump_sampler: Option<StateSampler<T>>,
    pub flow_reference: Option<Feedback<T>>,
    pub jump_reference: Option<Feedback<T>>,
    pub reference_tol: T,
    pub optimality_tol: T,
}

impl<T: Scalar> CheckPlan<T> {
    pub fn new(samples: usize, oracle_samples: usize, seed: u64) -> Self {
        Self {
            samples,
            oracle_samples,
            feasible_samples: 1000,
            seed,
            flow_sampler: None,
            jump_sampler: None,
            flow_reference: None,
            jump_reference: None,
            reference_tol: T::lit(1e-8),
            optimality_tol: T::lit(1e-9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideStats<T> {
    pub states: usize,
    pub selection_errors: usize,
    pub max_reference_dev: T,
    pub reference_failures: usize,
    /// Largest `| |ρ(x)| − oracle norm | − 2·resolution`.
    pub worst_oracle_excess: T,
    pub oracle_failures: usize,
    pub oracle_inconclusive: usize,
    pub feasible_checked: usize,
    pub optimality_violations: usize,
    pub max_upsilon: T,
    pub upsilon_violations: usize,
}

impl<T: Scalar> SideStats<T> {
    fn empty() -> Self {
        Self {
            states: 0,
            selection_errors: 0,
            max_reference_dev: T::zero(),
            reference_failures: 0,
            worst_oracle_excess: T::neg_infinity(),
            oracle_failures: 0,
            oracle_inconclusive: 0,
            feasible_checked: 0,
            optimality_violations: 0,
            max_upsilon: T::neg_infinity(),
            upsilon_violations: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.selection_errors == 0
            && self.reference_failures == 0
            && self.oracle_failures == 0
            && self.oracle_inconclusive == 0
            && self.optimality_violations == 0
            && self.upsilon_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport<T> {
    pub flow: SideStats<T>,
    pub jump: SideStats<T>,
}

impl<T: Scalar> CheckReport<T> {
    pub fn passed(&self) -> bool {
        self.flow.passed() && self.jump.passed()
    }

    /// `name,value` lines.
    pub fn to_lines(&self) -> Vec<(String, String)> {
        let mut out = vec![];
        for (name, s) in [("flow", &self.flow), ("jump", &self.jump)] {
            let e = |v: T| format!("{:.16e}", v);
            out.push((format!("{name}.states"), s.states.to_string()));
            out.push((format!("{name}.selection_errors"), s.selection_errors.to_string()));
            out.push((format!("{name}.max_reference_dev"), e(s.max_reference_dev)));
            out.push((format!("{name}.reference_failures"), s.reference_failures.to_string()));
            out.push((format!("{name}.worst_oracle_excess"), e(s.worst_oracle_excess)));
            out.push((format!("{name}.oracle_failures"), s.oracle_failures.to_string()));
            out.push((format!("{name}.oracle_inconclusive"), s.oracle_inconclusive.to_string()));
            out.push((format!("{name}.feasible_checked"), s.feasible_checked.to_string()));
            out.push((format!("{name}.optimality_violations"), s.optimality_violations.to_string()));
            out.push((format!("{name}.max_upsilon"), e(s.max_upsilon)));
            out.push((format!("{name}.upsilon_violations"), s.upsilon_violations.to_string()));
        }
        out.push(("passed".into(), self.passed().to_string()));
        out
    }
}

struct Outcome<T> {
    error: bool,
    reference_dev: Option<T>,
    oracle_excess: Option<T>,
    inconclusive: bool,
    feasible_checked: usize,
    optimality_violations: usize,
    upsilon: Option<T>,
}

fn mix(seed: u64, i: u64) -> u64 {
    seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `count` uniform random members of `set` within `[-radius, radius]^m`, or all of its
/// elements when the base is finite. Structured cuts are sampled inside their resolved box;
/// other cuts by rejection with a bounded number of attempts.
fn sample_members<T: Scalar>(
    set: &FeasibleSet<T>,
    count: usize,
    seed: u64,
    radius: T,
    ctl: &MinNormController<T>,
) -> Vec<Vec<T>> {
    let cfg = ctl.solver();
    if let FeasibleSet::Finite(v) = set.base() {
        return v.iter().filter(|u| member(set, u, cfg)).cloned().collect();
    }
    let resolved = set.resolve(cfg.feas_tol);
    let (b, exact) = match &resolved {
        FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => (b, true),
        FeasibleSet::Cut { base, .. } => match base.as_ref() {
            FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => (b, false),
            _ => return vec![],
        },
        _ => return vec![],
    };
    let m = b.dim();
    let lo: Vec<T> = b.lower.iter().map(|l| l.max(-radius)).collect();
    let hi: Vec<T> = b.upper.iter().map(|h| h.min(radius)).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return vec![];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = if exact { count } else { count.saturating_mul(100) };
    let mut out = Vec::with_capacity(count);
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let u: Vec<T> = (0..m)
            .map(|i| lo[i] + (hi[i] - lo[i]) * T::lit(rng.gen::<f64>()))
            .collect();
        if exact || member(set, &u, cfg) {
            out.push(u);
        }
    }
    out
}

fn evaluate<T: Scalar>(
    ctl: &MinNormController<T>,
    plan: &CheckPlan<T>,
    side: Side,
    x: &[T],
    seed: u64,
) -> Outcome<T> {
    let mut out = Outcome {
        error: false,
        reference_dev: None,
        oracle_excess: None,
        inconclusive: false,
        feasible_checked: 0,
        optimality_violations: 0,
        upsilon: None,
    };
    let (rho, set) = match (ctl.select_control(side, x), ctl.admissible(side, x)) {
        (Ok(r), Ok(s)) => (r, s),
        _ => {
            out.error = true;
            return out;
        }
    };
    let reference = match side {
        Side::Flow => plan.flow_reference.as_ref(),
        Side::Jump => plan.jump_reference.as_ref(),
    };
    if let Some(reference) = reference {
        out.reference_dev = Some(dist(&rho, &reference(x)));
    }
    if !ctl.is_synthesized(side) {
        return out;
    }
    out.upsilon = upsilon(ctl.system(), ctl.clf(), side, x, &rho)
        .ok()
        .map(|v| v.to_scalar());
    let rho_norm = norm(&rho);
    match oracle_expanding(&set, plan.oracle_samples, seed, T::one(), ctl.solver()) {
        Ok(o) => {
            out.oracle_excess = Some((rho_norm - o.norm).abs() - T::lit(2.0) * o.resolution);
        }
        Err(Error::NoFeasibleSample) => out.inconclusive = true,
        Err(_) => out.error = true,
    }
    let radius = T::one().max(T::lit(2.0) * rho_norm);
    for u in sample_members(&set, plan.feasible_samples, seed.rotate_left(17), radius, ctl) {
        out.feasible_checked += 1;
        if rho_norm > norm(&u) + plan.optimality_tol {
            out.optimality_violations += 1;
        }
    }
    out
}

fn draw_states<T: Scalar>(
    ctl: &MinNormController<T>,
    side: Side,
    sampler: &StateSampler<T>,
    count: usize,
    seed: u64,
) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while states.len() < count && attempts < count.saturating_mul(1000).max(1000) {
        attempts += 1;
        let x = sampler(&mut rng);
        if ctl.admissible(side, &x).is_ok() && ctl.clf().value(&x) > T::zero() {
            states.push(x);
        }
    }
    states
}

/// Draws seeded states per side and compares the selected law with the reference law, the
/// brute-force oracle and random admissible inputs.
pub fn check_min_norm<T: Scalar>(ctl: &MinNormController<T>, plan: &CheckPlan<T>) -> Result<CheckReport<T>> {
    if plan.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if plan.oracle_samples == 0 {
        return Err(Error::InvalidArgument("oracle_samples must be at least 1".into()));
    }
    let mut sides = vec![];
    for (idx, side, sampler) in [
        (0u64, Side::Flow, plan.flow_sampler.as_ref()),
        (1u64, Side::Jump, plan.jump_sampler.as_ref()),
    ] {
        let mut stats = SideStats::<T>::empty();
        if let Some(sampler) = sampler {
            let states = draw_states(ctl, side, sampler, plan.samples, mix(plan.seed, idx));
            let outcomes: Vec<Outcome<T>> = states
                .par_iter()
                .enumerate()
                .map(|(i, x)| evaluate(ctl, plan, side, x, mix(plan.seed, 1000 + idx * 1_000_000 + i as u64)))
                .collect();
            stats.states = states.len();
            for o in outcomes {
                if o.error {
                    stats.selection_errors += 1;
                }
                if let Some(d) = o.reference_dev {
                    stats.max_reference_dev = stats.max_reference_dev.max(d);
                    if d > plan.reference_tol {
                        stats.reference_failures += 1;
                    }
                }
                if let Some(e) = o.oracle_excess {
                    stats.worst_oracle_excess = stats.worst_oracle_excess.max(e);
                    if e > T::lit(1e-9) {
                        stats.oracle_failures += 1;
                    }
                }
                if o.inconclusive {
                    stats.oracle_inconclusive += 1;
                }
                stats.feasible_checked += o.feasible_checked;
                stats.optimality_violations += o.optimality_violations;
                if let Some(u) = o.upsilon {
                    stats.max_upsilon = stats.max_upsilon.max(u);
                    if u > plan.optimality_tol {
                        stats.upsilon_violations += 1;
                    }
                }
            }
            if stats.states < plan.samples {
                stats.selection_errors += plan.samples - stats.states;
            }
        }
        sides.push(stats);
    }
    let jump = sides.pop().unwrap();
    let flow = sides.pop().unwrap();
    Ok(CheckReport { flow, jump })
}
