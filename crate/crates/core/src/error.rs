use thiserror::Error;

/// Which half of the hybrid dynamics a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Flow,
    Jump,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Flow => f.write_str("flow"),
            Side::Jump => f.write_str("jump"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite state encountered at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("guard changed sign more than once within one step (dt = {dt}); reduce dt")]
    StepTooLarge { dt: f64 },
    #[error("admissible {side} input set is empty at x = {x:?}")]
    Infeasible { side: Side, x: Vec<f64> },
    #[error("state x = {x:?} is outside the domain of the {side} law: {reason}")]
    OutOfDomain {
        side: Side,
        x: Vec<f64>,
        reason: &'static str,
    },
    #[error("feasible set is empty")]
    EmptySet,
    #[error("feasibility along a line is disconnected; constraint is not convex")]
    NonConvexDetected,
    #[error("no oracle sample satisfied the constraint")]
    NoFeasibleSample,
    #[error("system registers no closed-form {side} input map and its guard is not input-separable")]
    UnsupportedGuard { side: Side },
    #[error("CLF gradient unavailable at x = {x:?} (outside smoothness region)")]
    GradientUnavailable { x: Vec<f64> },
    #[error("parameter constraint violated: {0}")]
    ParamConstraintViolated(String),
    #[error("flow and jump admissible sets do not intersect at x = {x:?}")]
    IntersectionEmpty { x: Vec<f64> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn to_f64s<T: crate::Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.as_f64()).collect()
}
