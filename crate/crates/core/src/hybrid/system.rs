//! Hybrid systems with inputs, data (C, f, D, g).

use std::fmt;
use std::sync::Arc;

use crate::clf::FeasibleSet;
use crate::error::{Error, Result, Side};
use crate::Scalar;

pub type FlowMap<T> = Arc<dyn Fn(&[T], &[T]) -> Vec<T> + Send + Sync>;
/// Set-valued jump map; the returned list is the value set in a fixed enumeration order.
pub type JumpMap<T> = Arc<dyn Fn(&[T], &[T]) -> Vec<Vec<T>> + Send + Sync>;
/// `(x, u)` belongs to the set iff the guard is `>= 0`.
pub type Guard<T> = Arc<dyn Fn(&[T], &[T]) -> T + Send + Sync>;
/// State-only signed function, `>= 0` iff `x` lies in a projected set.
pub type Region<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
pub type InputMap<T> = Arc<dyn Fn(&[T]) -> FeasibleSet<T> + Send + Sync>;
pub type Feedback<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

#[derive(Clone)]
enum InputMapSource<T> {
    ClosedForm(InputMap<T>),
    /// Guard does not depend on u: Ψ(x) is the whole input space on the projection.
    Separable,
    Unsupported,
}

#[derive(Clone)]
struct SideData<T> {
    input_dim: usize,
    guard: Guard<T>,
    region: Region<T>,
    input_space: FeasibleSet<T>,
    psi: InputMapSource<T>,
}

/// Hybrid system `H = (C, f, D, g)` with flow inputs in ℝ^{m_c} and jump inputs in ℝ^{m_d}.
#[derive(Clone)]
pub struct HybridSystem<T> {
    state_dim: usize,
    flow_map: FlowMap<T>,
    jump_map: JumpMap<T>,
    flow: SideData<T>,
    jump: SideData<T>,
    shared_input: bool,
    guard_tol: T,
}

impl<T: Scalar> fmt::Debug for HybridSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HybridSystem")
            .field("state_dim", &self.state_dim)
            .field("input_dim_c", &self.flow.input_dim)
            .field("input_dim_d", &self.jump.input_dim)
            .field("guard_tol", &self.guard_tol)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> HybridSystem<T> {
    pub fn builder(state_dim: usize, input_dim_c: usize, input_dim_d: usize) -> HybridSystemBuilder<T> {
        HybridSystemBuilder::new(state_dim, input_dim_c, input_dim_d)
    }

    fn side(&self, side: Side) -> &SideData<T> {
        match side {
            Side::Flow => &self.flow,
            Side::Jump => &self.jump,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self, side: Side) -> usize {
        self.side(side).input_dim
    }

    pub fn guard_tol(&self) -> T {
        self.guard_tol
    }

    pub fn shared_input(&self) -> bool {
        self.shared_input
    }

    pub fn flow(&self, x: &[T], u: &[T]) -> Vec<T> {
        (self.flow_map)(x, u)
    }

    pub fn jumps(&self, x: &[T], u: &[T]) -> Vec<Vec<T>> {
        (self.jump_map)(x, u)
    }

    pub fn guard(&self, side: Side, x: &[T], u: &[T]) -> T {
        (self.side(side).guard)(x, u)
    }

    /// `(x, u)` ∈ C (resp. D) up to `guard_tol`.
    pub fn in_set(&self, side: Side, x: &[T], u: &[T]) -> bool {
        self.guard(side, x, u) >= -self.guard_tol
    }

    pub fn region(&self, side: Side, x: &[T]) -> T {
        (self.side(side).region)(x)
    }

    /// `x` ∈ Π(C) (resp. Π(D)) up to `guard_tol`.
    pub fn in_projection(&self, side: Side, x: &[T]) -> bool {
        self.region(side, x) >= -self.guard_tol
    }

    pub fn input_space(&self, side: Side) -> &FeasibleSet<T> {
        &self.side(side).input_space
    }

    /// Ψ_side(x) = {u ∈ U_side : guard_side(x, u) >= 0}.
    pub fn feasible_inputs(&self, side: Side, x: &[T]) -> Result<FeasibleSet<T>> {
        let data = self.side(side);
        if x.len() != self.state_dim {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim,
                got: x.len(),
            });
        }
        match &data.psi {
            InputMapSource::ClosedForm(map) => Ok(map(x)),
            InputMapSource::Separable => Ok(if self.in_projection(side, x) {
                data.input_space.clone()
            } else {
                FeasibleSet::Empty
            }),
            InputMapSource::Unsupported => Err(Error::UnsupportedGuard { side }),
        }
    }
}

/// Builder for [`HybridSystem`].
pub struct HybridSystemBuilder<T> {
    state_dim: usize,
    dims: (usize, usize),
    flow_map: Option<FlowMap<T>>,
    jump_map: Option<JumpMap<T>>,
    guards: (Option<Guard<T>>, Option<Guard<T>>),
    regions: (Option<Region<T>>, Option<Region<T>>),
    spaces: (Option<FeasibleSet<T>>, Option<FeasibleSet<T>>),
    psi: (InputMapSource<T>, InputMapSource<T>),
    shared_input: bool,
    guard_tol: T,
}

impl<T: Scalar> HybridSystemBuilder<T> {
    pub fn new(state_dim: usize, input_dim_c: usize, input_dim_d: usize) -> Self {
        let auto = |m: usize| {
            if m == 0 {
                InputMapSource::Separable
            } else {
                InputMapSource::Unsupported
            }
        };
        Self {
            state_dim,
            dims: (input_dim_c, input_dim_d),
            flow_map: None,
            jump_map: None,
            guards: (None, None),
            regions: (None, None),
            spaces: (None, None),
            psi: (auto(input_dim_c), auto(input_dim_d)),
            shared_input: false,
            guard_tol: T::lit(1e-9),
        }
    }

    pub fn flow_map(mut self, f: impl Fn(&[T], &[T]) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.flow_map = Some(Arc::new(f));
        self
    }

    pub fn jump_map(mut self, g: impl Fn(&[T], &[T]) -> Vec<Vec<T>> + Send + Sync + 'static) -> Self {
        self.jump_map = Some(Arc::new(g));
        self
    }

    /// Single-valued jump map convenience.
    pub fn jump_map_single(self, g: impl Fn(&[T], &[T]) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.jump_map(move |x, u| vec![g(x, u)])
    }

    pub fn flow_guard(mut self, h: impl Fn(&[T], &[T]) -> T + Send + Sync + 'static) -> Self {
        self.guards.0 = Some(Arc::new(h));
        self
    }

    pub fn jump_guard(mut self, h: impl Fn(&[T], &[T]) -> T + Send + Sync + 'static) -> Self {
        self.guards.1 = Some(Arc::new(h));
        self
    }

    /// Signed function of x, `>= 0` iff x ∈ Π(C). Used for event location.
    pub fn flow_region(mut self, h: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        self.regions.0 = Some(Arc::new(h));
        self
    }

    /// Signed function of x, `>= 0` iff x ∈ Π(D).
    pub fn jump_region(mut self, h: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        self.regions.1 = Some(Arc::new(h));
        self
    }

    pub fn input_space_c(mut self, u: FeasibleSet<T>) -> Self {
        self.spaces.0 = Some(u);
        self
    }

    pub fn input_space_d(mut self, u: FeasibleSet<T>) -> Self {
        self.spaces.1 = Some(u);
        self
    }

    /// Registers Ψ_c in closed form.
    pub fn psi_c(mut self, map: impl Fn(&[T]) -> FeasibleSet<T> + Send + Sync + 'static) -> Self {
        self.psi.0 = InputMapSource::ClosedForm(Arc::new(map));
        self
    }

    pub fn psi_d(mut self, map: impl Fn(&[T]) -> FeasibleSet<T> + Send + Sync + 'static) -> Self {
        self.psi.1 = InputMapSource::ClosedForm(Arc::new(map));
        self
    }

    /// Declares that the flow guard does not depend on u.
    pub fn flow_separable(mut self) -> Self {
        self.psi.0 = InputMapSource::Separable;
        self
    }

    pub fn jump_separable(mut self) -> Self {
        self.psi.1 = InputMapSource::Separable;
        self
    }

    /// Declares m_c = m_d with U_c = U_d (common-input case).
    pub fn shared_input(mut self, shared: bool) -> Self {
        self.shared_input = shared;
        self
    }

    pub fn guard_tol(mut self, tol: T) -> Self {
        self.guard_tol = tol;
        self
    }

    pub fn build(self) -> Result<HybridSystem<T>> {
        let missing = |what: &str| Error::InvalidArgument(format!("hybrid system is missing {what}"));
        if self.state_dim == 0 {
            return Err(Error::InvalidArgument("state dimension must be positive".into()));
        }
        let (mc, md) = self.dims;
        let flow_map = self.flow_map.ok_or_else(|| missing("a flow map"))?;
        let jump_map = self.jump_map.ok_or_else(|| missing("a jump map"))?;
        let flow_guard = self.guards.0.ok_or_else(|| missing("a flow guard"))?;
        let jump_guard = self.guards.1.ok_or_else(|| missing("a jump guard"))?;
        let flow_region = self.regions.0.ok_or_else(|| missing("a flow region"))?;
        let jump_region = self.regions.1.ok_or_else(|| missing("a jump region"))?;
        let space = |s: Option<FeasibleSet<T>>, m: usize| -> Result<FeasibleSet<T>> {
            let s = s.unwrap_or_else(|| {
                if m == 0 {
                    FeasibleSet::singleton(vec![])
                } else {
                    FeasibleSet::full(m)
                }
            });
            match s.dim() {
                Some(d) if d != m => Err(Error::DimensionMismatch { expected: m, got: d }),
                _ => Ok(s),
            }
        };
        let input_space_c = space(self.spaces.0, mc)?;
        let input_space_d = space(self.spaces.1, md)?;
        if self.shared_input && mc != md {
            return Err(Error::InvalidArgument("shared input requires m_c = m_d".into()));
        }
        if !(self.guard_tol >= T::zero()) {
            return Err(Error::InvalidArgument("guard_tol must be nonnegative".into()));
        }
        Ok(HybridSystem {
            state_dim: self.state_dim,
            flow_map,
            jump_map,
            flow: SideData {
                input_dim: mc,
                guard: flow_guard,
                region: flow_region,
                input_space: input_space_c,
                psi: self.psi.0,
            },
            jump: SideData {
                input_dim: md,
                guard: jump_guard,
                region: jump_region,
                input_space: input_space_d,
                psi: self.psi.1,
            },
            shared_input: self.shared_input,
            guard_tol: self.guard_tol,
        })
    }
}
