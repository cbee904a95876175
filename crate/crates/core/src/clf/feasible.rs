//! Exact descriptions of constrained input sets (values of the Ψ and T maps).

use std::fmt;
use std::sync::Arc;

use crate::linalg::{lex_less, norm_sq};
use crate::Scalar;

/// Componentwise bounds; entries may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bounds dimension mismatch");
        Self { lower, upper }
    }

    /// All of ℝ^m.
    pub fn full(m: usize) -> Self {
        Self::new(vec![T::neg_infinity(); m], vec![T::infinity(); m])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    pub fn is_bounded(&self) -> bool {
        self.lower
            .iter()
            .chain(&self.upper)
            .all(|v| v.is_finite())
    }

    pub fn contains(&self, u: &[T], tol: T) -> bool {
        u.len() == self.dim()
            && u
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, h))| *v >= *l - tol && *v <= *h + tol)
    }

    pub fn clamp(&self, u: &[T]) -> Vec<T> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, h))| v.max(*l).min(*h))
            .collect()
    }

    /// The norm-minimal point of the box (componentwise clamp of 0).
    pub fn min_norm_point(&self) -> Vec<T> {
        self.clamp(&vec![T::zero(); self.dim()])
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::new(
            self.lower
                .iter()
                .zip(&other.lower)
                .map(|(a, b)| a.max(*b))
                .collect(),
            self.upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a.min(*b))
                .collect(),
        )
    }
}

/// Convex scalar constraint `h(u) <= 0` cutting a base set.
#[derive(Clone)]
pub enum ConstraintFn<T> {
    /// `offset + slope · u <= 0`
    Affine { offset: T, slope: Vec<T> },
    /// `a u_axis² + b u_axis + c <= 0` with `a >= 0`.
    Quadratic1D { axis: usize, a: T, b: T, c: T },
    /// Convex scalar function of u; membership by evaluation.
    Blackbox(BlackboxFn<T>),
}

pub type BlackboxFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

impl<T: Scalar> ConstraintFn<T> {
    pub fn blackbox(f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        ConstraintFn::Blackbox(Arc::new(f))
    }

    pub fn eval(&self, u: &[T]) -> T {
        match self {
            ConstraintFn::Affine { offset, slope } => {
                *offset + crate::linalg::dot(slope, u)
            }
            ConstraintFn::Quadratic1D { axis, a, b, c } => {
                let v = u[*axis];
                *a * v * v + *b * v + *c
            }
            ConstraintFn::Blackbox(f) => f(u),
        }
    }

    pub fn is_structured(&self) -> bool {
        !matches!(self, ConstraintFn::Blackbox(_))
    }

    /// Restriction of the constraint to a single coordinate, solved with slack `tol`
    /// (absolute for affine cuts, relative to `|c|` for quadratic ones).
    pub(crate) fn axis_cut(&self, tol: T) -> AxisCut<T> {
        match self {
            ConstraintFn::Affine { offset, slope } => {
                let nz: Vec<usize> = (0..slope.len())
                    .filter(|&i| slope[i] != T::zero())
                    .collect();
                match nz.as_slice() {
                    [] => {
                        if *offset <= tol {
                            AxisCut::Always
                        } else {
                            AxisCut::Never
                        }
                    }
                    [i] => {
                        let s = slope[*i];
                        let edge = (tol - *offset) / s;
                        if s > T::zero() {
                            AxisCut::Interval(*i, T::neg_infinity(), edge)
                        } else {
                            AxisCut::Interval(*i, edge, T::infinity())
                        }
                    }
                    _ => AxisCut::NotSeparable,
                }
            }
            ConstraintFn::Quadratic1D { axis, a, b, c } => {
                let c = *c - tol * T::one().max(c.abs());
                if *a == T::zero() {
                    if *b == T::zero() {
                        return if c <= T::zero() {
                            AxisCut::Always
                        } else {
                            AxisCut::Never
                        };
                    }
                    let edge = -c / *b;
                    return if *b > T::zero() {
                        AxisCut::Interval(*axis, T::neg_infinity(), edge)
                    } else {
                        AxisCut::Interval(*axis, edge, T::infinity())
                    };
                }
                let disc = *b * *b - T::lit(4.0) * *a * c;
                if disc < T::zero() {
                    return AxisCut::Never;
                }
                let sq = disc.sqrt();
                // numerically stable pair of roots
                let q = if *b >= T::zero() {
                    -(*b + sq) / T::lit(2.0)
                } else {
                    -(*b - sq) / T::lit(2.0)
                };
                let (r1, r2) = if q == T::zero() {
                    (T::zero(), T::zero())
                } else {
                    (q / *a, c / q)
                };
                AxisCut::Interval(*axis, r1.min(r2), r1.max(r2))
            }
            ConstraintFn::Blackbox(_) => AxisCut::NotSeparable,
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for ConstraintFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintFn::Affine { offset, slope } => f
                .debug_struct("Affine")
                .field("offset", offset)
                .field("slope", slope)
                .finish(),
            ConstraintFn::Quadratic1D { axis, a, b, c } => f
                .debug_struct("Quadratic1D")
                .field("axis", axis)
                .field("a", a)
                .field("b", b)
                .field("c", c)
                .finish(),
            ConstraintFn::Blackbox(_) => f.write_str("Blackbox(..)"),
        }
    }
}

impl<T: Scalar> fmt::Display for ConstraintFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintFn::Affine { offset, slope } => {
                write!(f, "affine: {} + [", offset)?;
                for (i, s) in slope.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", s)?;
                }
                f.write_str("]·u <= 0")
            }
            ConstraintFn::Quadratic1D { axis, a, b, c } => {
                write!(f, "quadratic: {a}·u[{axis}]² + {b}·u[{axis}] + {c} <= 0")
            }
            ConstraintFn::Blackbox(_) => f.write_str("blackbox: h(u) <= 0"),
        }
    }
}

pub(crate) enum AxisCut<T> {
    Always,
    Never,
    Interval(usize, T, T),
    NotSeparable,
}

/// A constrained input set.
#[derive(Debug, Clone)]
pub enum FeasibleSet<T> {
    Empty,
    Finite(Vec<Vec<T>>),
    Box(Bounds<T>),
    /// A box whose `axis` coordinate is the designated interval.
    Interval1D { axis: usize, bounds: Bounds<T> },
    /// Base set intersected with `{u : h(u) <= 0}` for every listed constraint.
    Cut {
        base: Box<FeasibleSet<T>>,
        constraints: Vec<ConstraintFn<T>>,
    },
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn full(m: usize) -> Self {
        FeasibleSet::Box(Bounds::full(m))
    }

    pub fn singleton(u: Vec<T>) -> Self {
        FeasibleSet::Finite(vec![u])
    }

    /// One-dimensional interval `[lo, hi]`.
    pub fn interval(lo: T, hi: T) -> Self {
        FeasibleSet::Interval1D {
            axis: 0,
            bounds: Bounds::new(vec![lo], vec![hi]),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            FeasibleSet::Empty => None,
            FeasibleSet::Finite(v) => v.first().map(|u| u.len()),
            FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => Some(b.dim()),
            FeasibleSet::Cut { base, .. } => base.dim(),
        }
    }

    /// Structural emptiness (does not evaluate cuts).
    pub fn is_trivially_empty(&self) -> bool {
        match self {
            FeasibleSet::Empty => true,
            FeasibleSet::Finite(v) => v.is_empty(),
            FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => b.is_empty(),
            FeasibleSet::Cut { base, .. } => base.is_trivially_empty(),
        }
    }

    pub fn base(&self) -> &FeasibleSet<T> {
        match self {
            FeasibleSet::Cut { base, .. } => base,
            other => other,
        }
    }

    pub fn constraints(&self) -> &[ConstraintFn<T>] {
        match self {
            FeasibleSet::Cut { constraints, .. } => constraints,
            _ => &[],
        }
    }

    pub fn bounds(&self) -> Option<&Bounds<T>> {
        match self.base() {
            FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => Some(b),
            _ => None,
        }
    }

    /// Adds a cut `h(u) <= 0`.
    pub fn cut(self, constraint: ConstraintFn<T>) -> Self {
        match self {
            FeasibleSet::Empty => FeasibleSet::Empty,
            FeasibleSet::Cut {
                base,
                mut constraints,
            } => {
                constraints.push(constraint);
                FeasibleSet::Cut { base, constraints }
            }
            base => FeasibleSet::Cut {
                base: Box::new(base),
                constraints: vec![constraint],
            },
        }
    }

    /// Membership with slack `tol` on bounds and constraints.
    pub fn contains_tol(&self, u: &[T], tol: T) -> bool {
        match self {
            FeasibleSet::Empty => false,
            FeasibleSet::Finite(v) => v
                .iter()
                .any(|e| e.len() == u.len() && e.iter().zip(u).all(|(a, b)| (*a - *b).abs() <= tol)),
            FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => b.contains(u, tol),
            FeasibleSet::Cut { base, constraints } => {
                base.contains_tol(u, tol) && constraints.iter().all(|c| c.eval(u) <= tol)
            }
        }
    }

    /// Exact membership.
    pub fn contains(&self, u: &[T]) -> bool {
        self.contains_tol(u, T::zero())
    }

    fn base_intersect(a: &FeasibleSet<T>, b: &FeasibleSet<T>) -> FeasibleSet<T> {
        use FeasibleSet::*;
        match (a, b) {
            (Empty, _) | (_, Empty) => Empty,
            (Finite(v), other) | (other, Finite(v)) => {
                let kept: Vec<Vec<T>> = v.iter().filter(|u| other.contains(u)).cloned().collect();
                if kept.is_empty() {
                    Empty
                } else {
                    Finite(kept)
                }
            }
            (Interval1D { axis, bounds: x }, Box(y))
            | (Box(y), Interval1D { axis, bounds: x })
            | (Interval1D { axis, bounds: x }, Interval1D { bounds: y, .. }) => {
                let bounds = x.intersect(y);
                if bounds.is_empty() {
                    Empty
                } else {
                    Interval1D { axis: *axis, bounds }
                }
            }
            (Box(x), Box(y)) => {
                let bounds = x.intersect(y);
                if bounds.is_empty() {
                    Empty
                } else {
                    Box(bounds)
                }
            }
            (Cut { .. }, _) | (_, Cut { .. }) => unreachable!("bases are never cuts"),
        }
    }

    /// Set intersection; cuts of both operands are kept.
    pub fn intersect(&self, other: &FeasibleSet<T>) -> FeasibleSet<T> {
        let base = Self::base_intersect(self.base(), other.base());
        let mut out = base;
        for c in self.constraints().iter().chain(other.constraints()) {
            out = out.cut(c.clone());
        }
        out
    }

    /// Simplifies structurally exact cases with slack `tol`: cut finite sets are filtered,
    /// boxes cut by single-coordinate constraints become tightened intervals.
    pub fn resolve(&self, tol: T) -> FeasibleSet<T> {
        match self {
            FeasibleSet::Cut { base, constraints } => match base.as_ref() {
                FeasibleSet::Finite(v) => {
                    let kept: Vec<Vec<T>> = v
                        .iter()
                        .filter(|u| constraints.iter().all(|c| c.eval(u) <= tol))
                        .cloned()
                        .collect();
                    if kept.is_empty() {
                        FeasibleSet::Empty
                    } else {
                        FeasibleSet::Finite(kept)
                    }
                }
                FeasibleSet::Box(_) | FeasibleSet::Interval1D { .. } => {
                    // exact edges first; the slack only rescues sets emptied by rounding
                    match self.resolve_axes(T::zero()) {
                        FeasibleSet::Empty if tol > T::zero() => self.resolve_axes(tol),
                        r => r,
                    }
                }
                _ => FeasibleSet::Empty,
            },
            FeasibleSet::Finite(v) if v.is_empty() => FeasibleSet::Empty,
            other if other.is_trivially_empty() => FeasibleSet::Empty,
            other => other.clone(),
        }
    }

    fn resolve_axes(&self, tol: T) -> FeasibleSet<T> {
        match self {
            FeasibleSet::Cut { base, constraints } => match base.as_ref() {
                FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => {
                    let mut bounds = b.clone();
                    let mut axis_used: Option<usize> = match base.as_ref() {
                        FeasibleSet::Interval1D { axis, .. } => Some(*axis),
                        _ => None,
                    };
                    for c in constraints {
                        match c.axis_cut(tol) {
                            AxisCut::Always => {}
                            AxisCut::Never => return FeasibleSet::Empty,
                            AxisCut::Interval(i, lo, hi) => {
                                bounds.lower[i] = bounds.lower[i].max(lo);
                                bounds.upper[i] = bounds.upper[i].min(hi);
                                axis_used.get_or_insert(i);
                            }
                            AxisCut::NotSeparable => return self.clone(),
                        }
                    }
                    if bounds.is_empty() {
                        FeasibleSet::Empty
                    } else {
                        match axis_used {
                            Some(axis) => FeasibleSet::Interval1D { axis, bounds },
                            None => FeasibleSet::Box(bounds),
                        }
                    }
                }
                _ => FeasibleSet::Empty,
            },
            other => other.clone(),
        }
    }

    /// Norm-minimal element of an uncut finite set, lexicographic tie-break.
    pub(crate) fn finite_min_norm(v: &[Vec<T>]) -> Option<Vec<T>> {
        let mut best: Option<(&Vec<T>, T)> = None;
        for u in v {
            let n = norm_sq(u);
            best = match best {
                None => Some((u, n)),
                Some((b, bn)) if n < bn || (n == bn && lex_less(u, b)) => Some((u, n)),
                keep => keep,
            };
        }
        best.map(|(u, _)| u.clone())
    }
}

fn fmt_scalar<T: Scalar>(v: T) -> String {
    if v.is_infinite() {
        if v > T::zero() { "+inf".into() } else { "-inf".into() }
    } else {
        format!("{:+}", v)
    }
}

/// Formats an input vector: a signed scalar in 1-D, a tuple otherwise.
pub fn fmt_vec<T: Scalar>(u: &[T]) -> String {
    if u.len() == 1 {
        fmt_scalar(u[0])
    } else {
        let parts: Vec<String> = u.iter().map(|v| fmt_scalar(*v)).collect();
        format!("({})", parts.join(", "))
    }
}

impl<T: Scalar> fmt::Display for FeasibleSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibleSet::Empty => f.write_str("Empty"),
            FeasibleSet::Finite(v) => {
                let parts: Vec<String> = v.iter().map(|u| fmt_vec(u)).collect();
                write!(f, "Finite{{{}}}", parts.join(", "))
            }
            FeasibleSet::Box(b) => {
                let parts: Vec<String> = b
                    .lower
                    .iter()
                    .zip(&b.upper)
                    .map(|(l, h)| format!("[{}, {}]", fmt_scalar(*l), fmt_scalar(*h)))
                    .collect();
                write!(f, "Box{}", parts.join(" x "))
            }
            FeasibleSet::Interval1D { axis, bounds } => {
                let (lo, hi) = (bounds.lower[*axis], bounds.upper[*axis]);
                let scale = T::one().max(lo.abs()).max(hi.abs());
                if lo.is_finite() && hi.is_finite() && (hi - lo) <= T::lit(1e-9) * scale {
                    write!(f, "singleton u[{}] = {}", axis, lo)?;
                } else {
                    write!(f, "Interval1D u[{}] in [{}, {}]", axis, fmt_scalar(lo), fmt_scalar(hi))?;
                }
                for i in (0..bounds.dim()).filter(|i| i != axis) {
                    write!(
                        f,
                        ", u[{}] in [{}, {}]",
                        i,
                        fmt_scalar(bounds.lower[i]),
                        fmt_scalar(bounds.upper[i])
                    )?;
                }
                Ok(())
            }
            FeasibleSet::Cut { base, constraints } => {
                write!(f, "Cut{{{}", base)?;
                for c in constraints {
                    write!(f, "; {}", c)?;
                }
                f.write_str("}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_cut_resolves_by_filtering() {
        let s = FeasibleSet::Finite(vec![vec![-1.0], vec![1.0]]).cut(ConstraintFn::Affine {
            offset: 0.5,
            slope: vec![-1.0],
        });
        let r = s.resolve(0.0);
        assert_eq!(r.to_string(), "Finite{+1}");
    }

    #[test]
    fn quadratic_cut_tightens_interval() {
        let s: FeasibleSet<f64> = FeasibleSet::interval(0.5, f64::INFINITY).cut(ConstraintFn::Quadratic1D {
            axis: 0,
            a: 1.0,
            b: 0.0,
            c: -1.0,
        });
        match s.resolve(0.0) {
            FeasibleSet::Interval1D { bounds, .. } => {
                assert_eq!(bounds.lower[0], 0.5);
                assert!((bounds.upper[0] - 1.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disjoint_quadratic_is_empty() {
        let s: FeasibleSet<f64> = FeasibleSet::interval(2.0, 3.0).cut(ConstraintFn::Quadratic1D {
            axis: 0,
            a: 1.0,
            b: 0.0,
            c: -1.0,
        });
        assert!(matches!(s.resolve(0.0), FeasibleSet::Empty));
        let neg: FeasibleSet<f64> = FeasibleSet::interval(-1.0, 1.0).cut(ConstraintFn::Quadratic1D {
            axis: 0,
            a: 1.0,
            b: 0.0,
            c: 1.0,
        });
        assert!(matches!(neg.resolve(0.0), FeasibleSet::Empty));
    }

    #[test]
    fn intersect_intervals_keeps_cuts() {
        let a: FeasibleSet<f64> = FeasibleSet::interval(1.0, 3.0);
        let b = FeasibleSet::interval(2.0, 5.0).cut(ConstraintFn::blackbox(|u: &[f64]| u[0] - 2.5));
        let s = a.intersect(&b);
        assert!(s.contains(&[2.2]));
        assert!(!s.contains(&[2.7]));
        assert!(!s.contains(&[1.5]));
        assert_eq!(s.constraints().len(), 1);
    }

    #[test]
    fn finite_min_norm_breaks_ties_lexicographically() {
        let v = vec![vec![1.0], vec![-1.0]];
        assert_eq!(FeasibleSet::finite_min_norm(&v), Some(vec![-1.0]));
    }

    #[test]
    fn box_min_norm_point_clamps_zero() {
        let b = Bounds::new(vec![f64::NEG_INFINITY, -1.5], vec![f64::INFINITY, -0.2]);
        assert_eq!(b.min_norm_point(), vec![0.0, -0.2]);
    }
}
