//! Γ, Υ and the admissible-input maps T, T′.

use std::fmt;

use crate::clf::{Clf, ConstraintFn, FeasibleSet, FlowRegime};
use crate::error::{Result, Side};
use crate::hybrid::HybridSystem;
use crate::linalg::dot;
use crate::Scalar;

/// Value in ℝ ∪ {−∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<T> {
    Finite(T),
    NegInfinity,
}

impl<T: Scalar> ExtReal<T> {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::NegInfinity => None,
        }
    }

    /// Lossy conversion, `−∞` mapped to the scalar's negative infinity.
    pub fn to_scalar(self) -> T {
        self.finite().unwrap_or_else(T::neg_infinity)
    }

    pub fn le(self, bound: T) -> bool {
        match self {
            ExtReal::Finite(v) => v <= bound,
            ExtReal::NegInfinity => true,
        }
    }
}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (ExtReal::NegInfinity, ExtReal::NegInfinity) => Some(Equal),
            (ExtReal::NegInfinity, _) => Some(Less),
            (_, ExtReal::NegInfinity) => Some(Greater),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// Γ_side(x, u, r): the CLF decrease residual on `C ∩ (I(r) × ℝ^m)` (resp. D), −∞ elsewhere.
pub fn gamma<T: Scalar>(
    sys: &HybridSystem<T>,
    clf: &Clf<T>,
    side: Side,
    x: &[T],
    u: &[T],
    r: T,
) -> Result<ExtReal<T>> {
    let v = clf.value(x);
    if v < r || !sys.in_set(side, x, u) {
        return Ok(ExtReal::NegInfinity);
    }
    let a3 = clf.alpha3(side, clf.dist_to_target(x));
    match side {
        Side::Flow => {
            let grad = clf.gradient(x)?;
            Ok(ExtReal::Finite(dot(&grad, &sys.flow(x, u)) + a3))
        }
        Side::Jump => {
            let worst = sys
                .jumps(x, u)
                .iter()
                .map(|eta| clf.value(eta))
                .fold(T::neg_infinity(), T::max);
            Ok(ExtReal::Finite(worst - v + a3))
        }
    }
}

/// Υ_side(x, u) = Γ_side(x, u, V(x)).
pub fn upsilon<T: Scalar>(
    sys: &HybridSystem<T>,
    clf: &Clf<T>,
    side: Side,
    x: &[T],
    u: &[T],
) -> Result<ExtReal<T>> {
    gamma(sys, clf, side, x, u, clf.value(x))
}

/// Pointwise T or the global variant T′ with a forward-invariance law on {V = 0}.
#[derive(Clone, Copy)]
pub enum AdmissibleMode<'a, T> {
    Pointwise,
    Global { rest: &'a (dyn Fn(&[T]) -> Vec<T> + Send + Sync) },
}

impl<T> fmt::Debug for AdmissibleMode<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibleMode::Pointwise => f.write_str("Pointwise"),
            AdmissibleMode::Global { .. } => f.write_str("Global"),
        }
    }
}

/// Whether a side's input is left unsynthesized: no input, or flows that leave V constant.
pub(crate) fn is_uncontrolled<T: Scalar>(sys: &HybridSystem<T>, clf: &Clf<T>, side: Side) -> bool {
    sys.input_dim(side) == 0 || (side == Side::Flow && clf.flow_regime() == FlowRegime::Neutral)
}

/// T_side(x) = Ψ_side(x) ∩ {u : Υ_side(x, u) <= 0}, or T′_side(x) in global mode.
pub fn admissible_set<T: Scalar>(
    sys: &HybridSystem<T>,
    clf: &Clf<T>,
    side: Side,
    x: &[T],
    mode: AdmissibleMode<'_, T>,
) -> Result<FeasibleSet<T>> {
    if let AdmissibleMode::Global { rest } = mode {
        if !sys.in_projection(side, x) {
            return Ok(FeasibleSet::full(sys.input_dim(side)));
        }
        if clf.value(x) <= T::zero() {
            return Ok(FeasibleSet::singleton(rest(x)));
        }
    }
    let psi = sys.feasible_inputs(side, x)?;
    if psi.is_trivially_empty() || is_uncontrolled(sys, clf, side) {
        return Ok(psi);
    }
    let cut = match clf.cut_form(side, x) {
        Some(c) => c,
        None => {
            if side == Side::Flow {
                clf.gradient(x)?;
            }
            let (sys, clf, x) = (sys.clone(), clf.clone(), x.to_vec());
            ConstraintFn::blackbox(move |u: &[T]| match upsilon(&sys, &clf, side, &x, u) {
                Ok(v) => v.to_scalar(),
                Err(_) => T::infinity(),
            })
        }
    };
    Ok(psi.cut(cut))
}
