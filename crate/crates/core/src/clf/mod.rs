//! Control Lyapunov functions and the Γ, Υ, Ψ and T constructions.

mod construct;
mod feasible;
mod function;
mod verify;

pub use construct::{admissible_set, gamma, upsilon, AdmissibleMode, ExtReal};
pub(crate) use construct::is_uncontrolled;
pub use feasible::{Bounds, ConstraintFn, FeasibleSet};
pub use feasible::fmt_vec as format_input;
pub use function::{Alpha3Mode, Clf, ClfBuilder, CutForm, FlowRegime, GradientFn, ScalarFn, SmoothnessFn, StateFn};
pub use verify::{input_candidates, verify_clf, Exclusion, GridPlan, VerifyReport};

use crate::error::{Result, Side};
use crate::hybrid::HybridSystem;
use crate::Scalar;

/// Ψ_side(x), the inputs keeping `(x, u)` in C (resp. D).
pub fn feasible_inputs<T: Scalar>(sys: &HybridSystem<T>, side: Side, x: &[T]) -> Result<FeasibleSet<T>> {
    sys.feasible_inputs(side, x)
}
