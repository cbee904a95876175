//! Grid verification of the CLF inequalities.

use std::sync::Arc;

use rayon::prelude::*;

use crate::clf::{gamma, Clf, FeasibleSet, FlowRegime};
use crate::error::Side;
use crate::hybrid::{Feedback, HybridSystem};
use crate::linalg::linspace;
use crate::Scalar;

pub type Exclusion<T> = Arc<dyn Fn(&[T]) -> bool + Send + Sync>;

/// Uniform tensor grid over a box plus optional exclusions and input witnesses.
#[derive(Clone)]
pub struct GridPlan<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    /// Points per axis.
    pub n: usize,
    /// Points for which this returns true are skipped.
    pub exclude: Option<Exclusion<T>>,
    /// Extra flow inputs tried at every state, e.g. a reference law.
    pub flow_witnesses: Vec<Feedback<T>>,
    pub jump_witnesses: Vec<Feedback<T>>,
}

impl<T: Scalar> GridPlan<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>, n: usize) -> Self {
        Self {
            lower,
            upper,
            n,
            exclude: None,
            flow_witnesses: vec![],
            jump_witnesses: vec![],
        }
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        let axes: Vec<Vec<T>> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, h)| linspace(*l, *h, self.n))
            .collect();
        cartesian(&axes)
    }
}

fn cartesian<T: Scalar>(axes: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![]];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    out
}

fn axis_candidates<T: Scalar>(lo: T, hi: T) -> Vec<T> {
    let mut c = vec![T::zero().max(lo).min(hi)];
    if lo.is_finite() && hi.is_finite() {
        c.extend(linspace(lo, hi, 11));
    } else {
        for v in [lo, hi] {
            if v.is_finite() {
                c.push(v);
            }
        }
        for e in -3..=8 {
            let m = T::lit(10f64.powi(e));
            for v in [m, -m] {
                let w = if lo.is_finite() && hi.is_infinite() {
                    lo + v.abs()
                } else if hi.is_finite() && lo.is_infinite() {
                    hi - v.abs()
                } else {
                    v
                };
                if w >= lo && w <= hi {
                    c.push(w);
                }
            }
        }
    }
    c
}

/// Deterministic input candidates covering a feasible set.
pub fn input_candidates<T: Scalar>(set: &FeasibleSet<T>) -> Vec<Vec<T>> {
    let raw = match set.base() {
        FeasibleSet::Empty | FeasibleSet::Cut { .. } => vec![],
        FeasibleSet::Finite(v) => v.clone(),
        FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => {
            let axes: Vec<Vec<T>> = b
                .lower
                .iter()
                .zip(&b.upper)
                .map(|(l, h)| axis_candidates(*l, *h))
                .collect();
            cartesian(&axes)
        }
    };
    raw.into_iter().filter(|u| set.contains(u)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<T> {
    pub points: usize,
    pub excluded: usize,
    pub bound_violations: usize,
    pub worst_bound: T,
    pub flow_checked: usize,
    pub flow_skipped_nonsmooth: usize,
    pub flow_violations: usize,
    pub worst_flow: T,
    pub flow_status: String,
    pub jump_checked: usize,
    pub jump_violations: usize,
    pub worst_jump: T,
}

impl<T: Scalar> VerifyReport<T> {
    pub fn total_violations(&self) -> usize {
        self.bound_violations + self.flow_violations + self.jump_violations
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0
    }

    /// `name,value` lines.
    pub fn to_lines(&self) -> Vec<(String, String)> {
        vec![
            ("points".into(), self.points.to_string()),
            ("excluded".into(), self.excluded.to_string()),
            ("bound_violations".into(), self.bound_violations.to_string()),
            ("worst_bound_excess".into(), format!("{:.16e}", self.worst_bound)),
            ("flow_status".into(), self.flow_status.clone()),
            ("flow_checked".into(), self.flow_checked.to_string()),
            ("flow_skipped_nonsmooth".into(), self.flow_skipped_nonsmooth.to_string()),
            ("flow_violations".into(), self.flow_violations.to_string()),
            ("worst_flow_excess".into(), format!("{:.16e}", self.worst_flow)),
            ("jump_checked".into(), self.jump_checked.to_string()),
            ("jump_violations".into(), self.jump_violations.to_string()),
            ("worst_jump_excess".into(), format!("{:.16e}", self.worst_jump)),
            ("total_violations".into(), self.total_violations().to_string()),
        ]
    }
}

#[derive(Default, Clone, Copy)]
struct PointResult<T> {
    excluded: bool,
    bound: Option<T>,
    flow: Option<T>,
    flow_skipped: bool,
    jump: Option<T>,
}

/// Smallest residual `Γ(x, u, 0)` over the candidate inputs. The jump residual takes the
/// most favourable element of a set-valued jump map.
fn best_residual<T: Scalar>(
    sys: &HybridSystem<T>,
    clf: &Clf<T>,
    side: Side,
    x: &[T],
    witnesses: &[Feedback<T>],
) -> Option<T> {
    let psi = sys.feasible_inputs(side, x).ok()?;
    let mut cands = input_candidates(&psi);
    for w in witnesses {
        let u = w(x);
        if psi.contains_tol(&u, sys.guard_tol()) {
            cands.push(u);
        }
    }
    let a3 = clf.alpha3(side, clf.dist_to_target(x));
    let v = clf.value(x);
    cands
        .iter()
        .filter_map(|u| match side {
            Side::Flow => gamma(sys, clf, side, x, u, T::zero()).ok()?.finite(),
            Side::Jump => {
                if !sys.in_set(side, x, u) {
                    return None;
                }
                let best = sys
                    .jumps(x, u)
                    .iter()
                    .map(|eta| clf.value(eta))
                    .fold(T::infinity(), T::min);
                Some(best - v + a3)
            }
        })
        .fold(None, |acc: Option<T>, r| Some(acc.map_or(r, |a| a.min(r))))
}

/// Checks the sandwich bounds and both decrease inequalities on every grid point.
pub fn verify_clf<T: Scalar>(
    sys: &HybridSystem<T>,
    clf: &Clf<T>,
    plan: &GridPlan<T>,
    tol: T,
) -> VerifyReport<T> {
    let neutral = clf.flow_regime() == FlowRegime::Neutral;
    let results: Vec<PointResult<T>> = plan
        .points()
        .par_iter()
        .map(|x| {
            if plan.exclude.as_ref().is_some_and(|e| e(x)) {
                return PointResult {
                    excluded: true,
                    ..Default::default()
                };
            }
            let d = clf.dist_to_target(x);
            let v = clf.value(x);
            let bound = (clf.alpha1(d) - v).max(v - clf.alpha2(d));
            let mut res = PointResult {
                bound: Some(bound),
                ..Default::default()
            };
            if !neutral && sys.in_projection(Side::Flow, x) {
                if clf.is_smooth_at(x) {
                    res.flow = Some(
                        best_residual(sys, clf, Side::Flow, x, &plan.flow_witnesses)
                            .unwrap_or_else(T::infinity),
                    );
                } else {
                    res.flow_skipped = true;
                }
            }
            if sys.in_projection(Side::Jump, x) {
                res.jump = Some(
                    best_residual(sys, clf, Side::Jump, x, &plan.jump_witnesses)
                        .unwrap_or_else(T::infinity),
                );
            }
            res
        })
        .collect();

    let mut report = VerifyReport {
        points: results.len(),
        excluded: 0,
        bound_violations: 0,
        worst_bound: T::neg_infinity(),
        flow_checked: 0,
        flow_skipped_nonsmooth: 0,
        flow_violations: 0,
        worst_flow: T::neg_infinity(),
        flow_status: if neutral {
            "skipped (nonsmooth/neutral)".into()
        } else {
            "checked".into()
        },
        jump_checked: 0,
        jump_violations: 0,
        worst_jump: T::neg_infinity(),
    };
    for r in results {
        if r.excluded {
            report.excluded += 1;
            continue;
        }
        if let Some(b) = r.bound {
            report.worst_bound = report.worst_bound.max(b);
            if b > tol {
                report.bound_violations += 1;
            }
        }
        if r.flow_skipped {
            report.flow_skipped_nonsmooth += 1;
        }
        if let Some(f) = r.flow {
            report.flow_checked += 1;
            report.worst_flow = report.worst_flow.max(f);
            if f > tol {
                report.flow_violations += 1;
            }
        }
        if let Some(j) = r.jump {
            report.jump_checked += 1;
            report.worst_jump = report.worst_jump.max(j);
            if j > tol {
                report.jump_violations += 1;
            }
        }
    }
    report
}
