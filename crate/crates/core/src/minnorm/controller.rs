//! Pointwise minimum-norm feedback laws and their closed loop.

use std::fmt;
use std::sync::Arc;

use crate::clf::{admissible_set, is_uncontrolled, AdmissibleMode, Clf, FeasibleSet};
use crate::error::{to_f64s, Error, Result, Side};
use crate::hybrid::{ClosedLoopControl, Feedback, HybridSystem};
use crate::minnorm::select::{min_norm_select, SolverConfig};
use crate::Scalar;

#[derive(Clone)]
pub enum ControllerMode<T> {
    /// Practical stabilization of `{V <= r}`; the law is defined on `{V >= r}`.
    Practical { r: T },
    /// Global law using forward-invariance laws on `{V = 0}`.
    Global { flow_rest: Feedback<T>, jump_rest: Feedback<T> },
    /// Common input for flows and jumps, practical variant.
    CommonPractical { r: T },
    CommonGlobal { rest: Feedback<T> },
}

impl<T: Scalar> fmt::Debug for ControllerMode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerMode::Practical { r } => write!(f, "Practical {{ r: {r} }}"),
            ControllerMode::Global { .. } => f.write_str("Global"),
            ControllerMode::CommonPractical { r } => write!(f, "CommonPractical {{ r: {r} }}"),
            ControllerMode::CommonGlobal { .. } => f.write_str("CommonGlobal"),
        }
    }
}

impl<T: Scalar> ControllerMode<T> {
    pub fn is_common(&self) -> bool {
        matches!(self, ControllerMode::CommonPractical { .. } | ControllerMode::CommonGlobal { .. })
    }

    fn sublevel(&self) -> Option<T> {
        match self {
            ControllerMode::Practical { r } | ControllerMode::CommonPractical { r } => Some(*r),
            _ => None,
        }
    }

    fn rest(&self, side: Side) -> Option<&Feedback<T>> {
        match (self, side) {
            (ControllerMode::Global { flow_rest, .. }, Side::Flow) => Some(flow_rest),
            (ControllerMode::Global { jump_rest, .. }, Side::Jump) => Some(jump_rest),
            (ControllerMode::CommonGlobal { rest }, _) => Some(rest),
            _ => None,
        }
    }
}

/// Assembled ρ_c / ρ_d laws.
#[derive(Clone)]
pub struct MinNormController<T> {
    sys: HybridSystem<T>,
    clf: Clf<T>,
    mode: ControllerMode<T>,
    solver: SolverConfig<T>,
}

impl<T: Scalar> fmt::Debug for MinNormController<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MinNormController")
            .field("mode", &self.mode)
            .field("solver", &self.solver)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> MinNormController<T> {
    pub fn new(
        sys: &HybridSystem<T>,
        clf: &Clf<T>,
        mode: ControllerMode<T>,
        solver: SolverConfig<T>,
    ) -> Result<Self> {
        if let Some(r) = mode.sublevel() {
            if !(r > T::zero()) {
                return Err(Error::InvalidArgument("practical mode requires r > 0".into()));
            }
        }
        if mode.is_common() && !sys.shared_input() {
            return Err(Error::InvalidArgument(
                "common-input mode requires a system declared with a shared input".into(),
            ));
        }
        if solver.oracle_samples == 0 {
            return Err(Error::InvalidArgument("oracle_samples must be positive".into()));
        }
        Ok(Self {
            sys: sys.clone(),
            clf: clf.clone(),
            mode,
            solver,
        })
    }

    pub fn practical(sys: &HybridSystem<T>, clf: &Clf<T>, r: T) -> Result<Self> {
        Self::new(sys, clf, ControllerMode::Practical { r }, SolverConfig::default())
    }

    pub fn system(&self) -> &HybridSystem<T> {
        &self.sys
    }

    pub fn clf(&self) -> &Clf<T> {
        &self.clf
    }

    pub fn mode(&self) -> &ControllerMode<T> {
        &self.mode
    }

    pub fn solver(&self) -> &SolverConfig<T> {
        &self.solver
    }

    fn out_of_domain(side: Side, x: &[T], reason: &'static str) -> Error {
        Error::OutOfDomain {
            side,
            x: to_f64s(x),
            reason,
        }
    }

    fn check_domain(&self, side: Side, x: &[T]) -> Result<()> {
        if x.len() != self.sys.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sys.state_dim(),
                got: x.len(),
            });
        }
        if !self.sys.in_projection(side, x) {
            return Err(Self::out_of_domain(side, x, "state is outside the projection of the side's set"));
        }
        if let Some(r) = self.mode.sublevel() {
            let v = self.clf.value(x);
            if v < r {
                return Err(Self::out_of_domain(side, x, "V(x) < r, the practical law is undefined here"));
            }
        }
        Ok(())
    }

    /// The set the law minimizes over at x (T or T′), after domain checks.
    pub fn admissible(&self, side: Side, x: &[T]) -> Result<FeasibleSet<T>> {
        self.check_domain(side, x)?;
        match self.mode.rest(side) {
            Some(rest) => admissible_set(&self.sys, &self.clf, side, x, AdmissibleMode::Global { rest: rest.as_ref() }),
            None => admissible_set(&self.sys, &self.clf, side, x, AdmissibleMode::Pointwise),
        }
    }

    /// ρ_side(x), the minimum-norm admissible input.
    pub fn select_control(&self, side: Side, x: &[T]) -> Result<Vec<T>> {
        self.check_domain(side, x)?;
        if self.sys.input_dim(side) == 0 {
            return Ok(vec![]);
        }
        if let Some(rest) = self.mode.rest(side) {
            if self.clf.value(x) <= T::zero() {
                return Ok(rest(x));
            }
        }
        let set = self.admissible(side, x)?;
        self.select_from(side, x, &set)
    }

    fn select_from(&self, side: Side, x: &[T], set: &FeasibleSet<T>) -> Result<Vec<T>> {
        match min_norm_select(set, &self.solver) {
            Err(Error::EmptySet) => Err(Error::Infeasible { side, x: to_f64s(x) }),
            other => other,
        }
    }

    /// Common-input law: minimum-norm element of T′_c ∩ T′_d on the overlap, the single-side
    /// law elsewhere.
    pub fn select_common_control(&self, x: &[T]) -> Result<Vec<T>> {
        let in_c = self.sys.in_projection(Side::Flow, x);
        let in_d = self.sys.in_projection(Side::Jump, x);
        match (in_c, in_d) {
            (true, false) => self.select_control(Side::Flow, x),
            (false, true) => self.select_control(Side::Jump, x),
            (false, false) => Err(Self::out_of_domain(
                Side::Flow,
                x,
                "state is outside the projections of C and D",
            )),
            (true, true) => {
                if let Some(rest) = self.mode.rest(Side::Flow) {
                    if self.clf.value(x) <= T::zero() {
                        return Ok(rest(x));
                    }
                }
                let tc = self.admissible(Side::Flow, x)?;
                let td = self.admissible(Side::Jump, x)?;
                let both = tc.intersect(&td);
                match min_norm_select(&both, &self.solver) {
                    Err(Error::EmptySet) => Err(Error::IntersectionEmpty { x: to_f64s(x) }),
                    other => other,
                }
            }
        }
    }

    /// Whether this side is synthesized (has inputs and a decrease requirement).
    pub fn is_synthesized(&self, side: Side) -> bool {
        !is_uncontrolled(&self.sys, &self.clf, side)
    }

    /// Autonomous closed loop `H̃` induced by this controller.
    pub fn closed_loop(&self) -> ClosedLoop<T> {
        ClosedLoop {
            controller: Arc::new(self.clone()),
        }
    }
}

impl<T: Scalar> ClosedLoopControl<T> for MinNormController<T> {
    fn flow_input(&self, x: &[T]) -> Result<Vec<T>> {
        if self.mode.is_common() {
            self.select_common_control(x)
        } else {
            self.select_control(Side::Flow, x)
        }
    }

    fn jump_input(&self, x: &[T]) -> Result<Vec<T>> {
        if self.mode.is_common() {
            self.select_common_control(x)
        } else {
            self.select_control(Side::Jump, x)
        }
    }

    fn lyapunov_value(&self, x: &[T]) -> T {
        self.clf.value(x)
    }
}

/// Closed loop with data `C̃ = {x : (x, ρ_c(x)) ∈ C}`, `f(x, ρ_c(x))`, `D̃`, `g(x, ρ_d(x))`.
#[derive(Clone)]
pub struct ClosedLoop<T> {
    controller: Arc<MinNormController<T>>,
}

impl<T: Scalar> ClosedLoop<T> {
    pub fn flow(&self, x: &[T]) -> Result<Vec<T>> {
        let u = self.controller.flow_input(x)?;
        Ok(self.controller.sys.flow(x, &u))
    }

    pub fn jump(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        let u = self.controller.jump_input(x)?;
        Ok(self.controller.sys.jumps(x, &u))
    }

    pub fn in_flow_set(&self, x: &[T]) -> Result<bool> {
        match self.controller.flow_input(x) {
            Ok(u) => Ok(self.controller.sys.in_set(Side::Flow, x, &u)),
            Err(Error::OutOfDomain { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn in_jump_set(&self, x: &[T]) -> Result<bool> {
        match self.controller.jump_input(x) {
            Ok(u) => Ok(self.controller.sys.in_set(Side::Jump, x, &u)),
            Err(Error::OutOfDomain { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// The closed loop as a hybrid system with zero-dimensional inputs. Where a law cannot
    /// be evaluated the guards are negative and the maps return NaN.
    pub fn to_system(&self) -> Result<HybridSystem<T>> {
        let n = self.controller.sys.state_dim();
        let nan = move || vec![T::nan(); n];
        let (c1, c2, c3, c4, c5, c6) = (
            self.clone(),
            self.clone(),
            self.clone(),
            self.clone(),
            self.clone(),
            self.clone(),
        );
        let guard_of = |on: bool| if on { T::zero() } else { -T::one() };
        HybridSystem::builder(n, 0, 0)
            .flow_map(move |x, _| c1.flow(x).unwrap_or_else(|_| nan()))
            .jump_map(move |x, _| c2.jump(x).unwrap_or_else(|_| vec![vec![T::nan(); n]]))
            .flow_guard(move |x, _| guard_of(c3.in_flow_set(x).unwrap_or(false)))
            .jump_guard(move |x, _| guard_of(c4.in_jump_set(x).unwrap_or(false)))
            .flow_region(move |x| guard_of(c5.in_flow_set(x).unwrap_or(false)))
            .jump_region(move |x| guard_of(c6.in_jump_set(x).unwrap_or(false)))
            .guard_tol(self.controller.sys.guard_tol())
            .build()
    }
}
