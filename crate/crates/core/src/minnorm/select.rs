//! Minimum-norm selection from a feasible set.

use crate::clf::{Bounds, ConstraintFn, FeasibleSet};
use crate::error::{Error, Result};
use crate::linalg::{axpy, linspace, norm, norm_sq, sub};
use crate::minnorm::oracle::oracle_expanding;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Use closed-form solutions where the set structure permits.
    pub exact_first: bool,
    pub oracle_samples: usize,
    pub seed: u64,
    pub bisection_steps: usize,
    /// Slack on structured (affine, quadratic) constraints.
    pub feas_tol: T,
    /// Slack on blackbox constraints.
    pub blackbox_tol: T,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            exact_first: true,
            oracle_samples: 20_000,
            seed: 0,
            bisection_steps: 60,
            feas_tol: T::lit(1e-12).max(T::epsilon() * T::lit(64.0)),
            blackbox_tol: T::lit(1e-9).max(T::epsilon() * T::lit(1024.0)),
        }
    }
}

pub(crate) fn constraint_tol<T: Scalar>(c: &ConstraintFn<T>, cfg: &SolverConfig<T>) -> T {
    if c.is_structured() {
        cfg.feas_tol
    } else {
        cfg.blackbox_tol
    }
}

/// Membership with the solver's slack on constraints and exact base bounds.
pub(crate) fn member<T: Scalar>(set: &FeasibleSet<T>, u: &[T], cfg: &SolverConfig<T>) -> bool {
    set.base().contains(u)
        && set
            .constraints()
            .iter()
            .all(|c| c.eval(u) <= constraint_tol(c, cfg))
}

/// The element of smallest Euclidean norm. Finite sets break ties lexicographically.
pub fn min_norm_select<T: Scalar>(set: &FeasibleSet<T>, cfg: &SolverConfig<T>) -> Result<Vec<T>> {
    if set.is_trivially_empty() {
        return Err(Error::EmptySet);
    }
    let constraints = set.constraints();
    match set.base() {
        FeasibleSet::Finite(v) => {
            let kept: Vec<Vec<T>> = v.iter().filter(|u| member(set, u, cfg)).cloned().collect();
            FeasibleSet::finite_min_norm(&kept).ok_or(Error::EmptySet)
        }
        FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => {
            if constraints.is_empty() {
                return Ok(b.min_norm_point());
            }
            if cfg.exact_first && constraints.iter().all(|c| c.is_structured()) {
                match set.resolve(cfg.feas_tol) {
                    FeasibleSet::Empty => return Err(Error::EmptySet),
                    FeasibleSet::Box(r) | FeasibleSet::Interval1D { bounds: r, .. } => {
                        return Ok(r.min_norm_point())
                    }
                    _ => {}
                }
                if let [ConstraintFn::Affine { offset, slope }] = constraints {
                    return affine_box_min_norm(b, *offset, slope, cfg.feas_tol);
                }
            }
            refine_generic(set, b, cfg)
        }
        FeasibleSet::Empty | FeasibleSet::Cut { .. } => Err(Error::EmptySet),
    }
}

/// min |u| over `box ∩ {ψ0 + ψ1·u <= tol}` by a breakpoint sweep on `u(μ) = clamp(−μψ1)`.
fn affine_box_min_norm<T: Scalar>(b: &Bounds<T>, psi0: T, psi1: &[T], tol: T) -> Result<Vec<T>> {
    let u_of = |mu: T| -> Vec<T> {
        psi1.iter()
            .zip(b.lower.iter().zip(&b.upper))
            .map(|(p, (l, h))| (-mu * *p).max(*l).min(*h))
            .collect()
    };
    let phi = |mu: T| psi0 + crate::linalg::dot(psi1, &u_of(mu));
    if phi(T::zero()) <= tol {
        return Ok(b.min_norm_point());
    }
    let mut breaks: Vec<T> = vec![T::zero()];
    for (i, p) in psi1.iter().enumerate() {
        if *p != T::zero() {
            for edge in [b.lower[i], b.upper[i]] {
                let mu = -edge / *p;
                if mu.is_finite() && mu > T::zero() {
                    breaks.push(mu);
                }
            }
        }
    }
    breaks.sort_by(|a, c| a.partial_cmp(c).unwrap());
    breaks.dedup();
    let mut prev = (T::zero(), phi(T::zero()));
    for &mu in &breaks[1..] {
        let val = phi(mu);
        if val <= T::zero() {
            let (m0, f0) = prev;
            let star = m0 + f0 * (mu - m0) / (f0 - val);
            return Ok(u_of(star));
        }
        prev = (mu, val);
    }
    // beyond the last breakpoint only unbounded coordinates still move
    let (m0, f0) = prev;
    let u0 = u_of(m0);
    let slope: T = psi1
        .iter()
        .zip(&u0)
        .enumerate()
        .filter(|(i, (p, u))| {
            let moving_down = **p > T::zero() && b.lower[*i] == T::neg_infinity();
            let moving_up = **p < T::zero() && b.upper[*i] == T::infinity();
            (moving_down || moving_up) && u.is_finite()
        })
        .map(|(_, (p, _))| *p * *p)
        .fold(T::zero(), |a, c| a + c);
    if slope <= T::zero() {
        return Err(Error::EmptySet);
    }
    Ok(u_of(m0 + f0 / slope))
}

/// Bisection on the segment `a -> b` (`a` infeasible, `b` feasible); returns the feasible end.
fn bisect_segment<T: Scalar>(
    set: &FeasibleSet<T>,
    a: &[T],
    b: &[T],
    cfg: &SolverConfig<T>,
) -> Vec<T> {
    let d = sub(b, a);
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..cfg.bisection_steps {
        let mid = (lo + hi) / T::lit(2.0);
        if member(set, &axpy(a, mid, &d), cfg) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = axpy(a, hi, &d);
    if member(set, &p, cfg) {
        p
    } else {
        b.to_vec()
    }
}

/// Oracle seed, bisection toward the base min-norm point, then projected pattern search.
fn refine_generic<T: Scalar>(set: &FeasibleSet<T>, b: &Bounds<T>, cfg: &SolverConfig<T>) -> Result<Vec<T>> {
    let p0 = b.min_norm_point();
    if member(set, &p0, cfg) {
        return Ok(p0);
    }
    let found = match oracle_expanding(set, cfg.oracle_samples, cfg.seed, T::one(), cfg) {
        Ok(o) => o.point,
        Err(Error::NoFeasibleSample) => return Err(Error::EmptySet),
        Err(e) => return Err(e),
    };

    // feasibility along p0 -> found must be a single interval ending at `found`
    let d = sub(&found, &p0);
    let mut entered = false;
    for s in linspace(T::zero(), T::one(), 64) {
        let ok = member(set, &axpy(&p0, s, &d), cfg);
        if ok {
            entered = true;
        } else if entered {
            return Err(Error::NonConvexDetected);
        }
    }

    let mut cur = bisect_segment(set, &p0, &found, cfg);
    let mut cur_n = norm_sq(&cur);
    let m = cur.len();
    let mut step = T::lit(0.25) * norm(&cur).max(T::lit(1e-3));
    let floor = T::lit(1e-13);
    let mut evals = 0usize;
    while step > floor * T::one().max(norm(&cur)) && evals < 200_000 {
        let mut improved = false;
        for i in 0..m {
            for sign in [T::one(), -T::one()] {
                let mut trial = cur.clone();
                trial[i] = trial[i] + sign * step;
                let trial = b.clamp(&trial);
                evals += 1;
                if !member(set, &trial, cfg) {
                    continue;
                }
                let pulled = bisect_segment(set, &p0, &trial, cfg);
                let n = norm_sq(&pulled);
                if n < cur_n {
                    cur = pulled;
                    cur_n = n;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step / T::lit(2.0);
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn finite_cut_selects_feasible_element() {
        let s = FeasibleSet::Finite(vec![vec![-1.0], vec![1.0]]).cut(ConstraintFn::Affine {
            offset: 0.5,
            slope: vec![-1.0],
        });
        assert_eq!(min_norm_select(&s, &cfg()).unwrap(), vec![1.0]);
    }

    #[test]
    fn quadratic_singleton_is_exact() {
        let e = (std::f64::consts::FRAC_PI_2).exp();
        let gx = 0.1 * 2f64.sqrt();
        let s = FeasibleSet::interval(gx, f64::INFINITY).cut(ConstraintFn::Quadratic1D {
            axis: 0,
            a: e,
            b: 0.0,
            c: -e * gx * gx,
        });
        let u = min_norm_select(&s, &cfg()).unwrap();
        assert_eq!(u, vec![gx]);
    }

    #[test]
    fn affine_box_inactive_cut_returns_clamped_zero() {
        let b = FeasibleSet::Box(Bounds::new(vec![f64::NEG_INFINITY, -1.0], vec![f64::INFINITY, -0.3]));
        let s = b.cut(ConstraintFn::Affine {
            offset: -2.0,
            slope: vec![3.0, 0.0],
        });
        assert_eq!(min_norm_select(&s, &cfg()).unwrap(), vec![0.0, -0.3]);
    }

    #[test]
    fn affine_two_axis_sweep_matches_projection() {
        // min |u| s.t. 1 - u0 - u1 <= 0 on R^2: (0.5, 0.5)
        let s = FeasibleSet::full(2).cut(ConstraintFn::Affine {
            offset: 1.0,
            slope: vec![-1.0, -1.0],
        });
        let u = min_norm_select(&s, &cfg()).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-12 && (u[1] - 0.5).abs() < 1e-12);
        // with u1 <= 0.2 the active set changes: (0.8, 0.2)
        let s = FeasibleSet::Box(Bounds::new(vec![f64::NEG_INFINITY; 2], vec![f64::INFINITY, 0.2])).cut(
            ConstraintFn::Affine {
                offset: 1.0,
                slope: vec![-1.0, -1.0],
            },
        );
        let u = min_norm_select(&s, &cfg()).unwrap();
        assert!((u[0] - 0.8).abs() < 1e-12 && (u[1] - 0.2).abs() < 1e-12, "{u:?}");
    }

    #[test]
    fn affine_infeasible_box_is_empty() {
        let s = FeasibleSet::Box(Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0])).cut(ConstraintFn::Affine {
            offset: 5.0,
            slope: vec![-1.0, -1.0],
        });
        assert_eq!(min_norm_select(&s, &cfg()), Err(Error::EmptySet));
    }

    #[test]
    fn blackbox_disc_matches_closed_form() {
        // disc of radius 1 centred at (2, 1): nearest point to 0 is c (1 - 1/|c|)
        let s = FeasibleSet::full(2).cut(ConstraintFn::blackbox(|u: &[f64]| {
            (u[0] - 2.0).powi(2) + (u[1] - 1.0).powi(2) - 1.0
        }));
        let u = min_norm_select(&s, &cfg()).unwrap();
        let c = 5f64.sqrt();
        let expect = [2.0 * (1.0 - 1.0 / c), 1.0 * (1.0 - 1.0 / c)];
        assert!((norm(&u) - (c - 1.0)).abs() < 1e-9, "{u:?}");
        assert!((u[0] - expect[0]).abs() < 1e-6 && (u[1] - expect[1]).abs() < 1e-6);
    }

    #[test]
    fn nonconvex_line_detected() {
        // two feasible pieces; the coarse oracle only sees the far one
        let s = FeasibleSet::interval(0.0, 10.0).cut(ConstraintFn::blackbox(|u: &[f64]| {
            let v = u[0];
            if (0.1..=0.2).contains(&v) || (0.9..=10.0).contains(&v) {
                -1.0
            } else {
                1.0
            }
        }));
        let cfg = SolverConfig {
            oracle_samples: 4,
            ..cfg()
        };
        assert_eq!(min_norm_select(&s, &cfg), Err(Error::NonConvexDetected));
    }
}
