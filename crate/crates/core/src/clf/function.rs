//! Control Lyapunov function data.

use std::fmt;
use std::sync::Arc;

use crate::clf::ConstraintFn;
use crate::error::{to_f64s, Error, Result, Side};
use crate::Scalar;

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
pub type StateFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
pub type GradientFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
pub type SmoothnessFn<T> = Arc<dyn Fn(&[T]) -> bool + Send + Sync>;
/// Exact description of `u ↦ Υ(x, u)` for fixed x, used as the cut of T(x).
pub type CutForm<T> = Arc<dyn Fn(&[T]) -> ConstraintFn<T> + Send + Sync>;

/// How the two α3 slots are used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alpha3Mode {
    /// Both sides use `min(α3_c, α3_d)`.
    #[default]
    Common,
    PerSide,
}

/// Whether the flow inequality is expected to hold with strict decrease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowRegime {
    #[default]
    Decrease,
    /// V is constant along flows; only the jump inequality is enforced.
    Neutral,
}

#[derive(Clone)]
pub struct Clf<T> {
    value: StateFn<T>,
    gradient: GradientFn<T>,
    smooth: Option<SmoothnessFn<T>>,
    alpha1: ScalarFn<T>,
    alpha2: ScalarFn<T>,
    alpha3_c: ScalarFn<T>,
    alpha3_d: ScalarFn<T>,
    alpha3_mode: Alpha3Mode,
    dist: StateFn<T>,
    flow_regime: FlowRegime,
    cut_c: Option<CutForm<T>>,
    cut_d: Option<CutForm<T>>,
}

impl<T: Scalar> fmt::Debug for Clf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Clf")
            .field("alpha3_mode", &self.alpha3_mode)
            .field("flow_regime", &self.flow_regime)
            .field("nonsmooth", &self.smooth.is_some())
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Clf<T> {
    /// Starts a CLF with the given value and gradient; α's default to `s²`, target A = {0}.
    pub fn builder(
        value: impl Fn(&[T]) -> T + Send + Sync + 'static,
        gradient: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> ClfBuilder<T> {
        let sq: ScalarFn<T> = Arc::new(|s: T| s * s);
        ClfBuilder {
            clf: Clf {
                value: Arc::new(value),
                gradient: Arc::new(gradient),
                smooth: None,
                alpha1: sq.clone(),
                alpha2: sq.clone(),
                alpha3_c: sq.clone(),
                alpha3_d: sq,
                alpha3_mode: Alpha3Mode::Common,
                dist: Arc::new(|x: &[T]| crate::linalg::norm(x)),
                flow_regime: FlowRegime::Decrease,
                cut_c: None,
                cut_d: None,
            },
        }
    }

    pub fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }

    pub fn is_smooth_at(&self, x: &[T]) -> bool {
        self.smooth.as_ref().is_none_or(|s| s(x))
    }

    pub fn is_nonsmooth(&self) -> bool {
        self.smooth.is_some()
    }

    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        if self.is_smooth_at(x) {
            Ok((self.gradient)(x))
        } else {
            Err(Error::GradientUnavailable { x: to_f64s(x) })
        }
    }

    pub fn alpha1(&self, s: T) -> T {
        (self.alpha1)(s)
    }

    pub fn alpha2(&self, s: T) -> T {
        (self.alpha2)(s)
    }

    /// α3 used on `side`, according to the α3 mode.
    pub fn alpha3(&self, side: Side, s: T) -> T {
        match (self.alpha3_mode, side) {
            (Alpha3Mode::Common, _) => self.alpha3_common(s),
            (Alpha3Mode::PerSide, Side::Flow) => (self.alpha3_c)(s),
            (Alpha3Mode::PerSide, Side::Jump) => (self.alpha3_d)(s),
        }
    }

    /// `min(α3_c(s), α3_d(s))`.
    pub fn alpha3_common(&self, s: T) -> T {
        (self.alpha3_c)(s).min((self.alpha3_d)(s))
    }

    pub fn alpha3_mode(&self) -> Alpha3Mode {
        self.alpha3_mode
    }

    /// `|x|_A`
    pub fn dist_to_target(&self, x: &[T]) -> T {
        (self.dist)(x)
    }

    pub fn flow_regime(&self) -> FlowRegime {
        self.flow_regime
    }

    pub fn cut_form(&self, side: Side, x: &[T]) -> Option<ConstraintFn<T>> {
        let form = match side {
            Side::Flow => self.cut_c.as_ref(),
            Side::Jump => self.cut_d.as_ref(),
        };
        form.map(|f| f(x))
    }
}

pub struct ClfBuilder<T> {
    clf: Clf<T>,
}

impl<T: Scalar> ClfBuilder<T> {
    pub fn alpha1(mut self, a: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.clf.alpha1 = Arc::new(a);
        self
    }

    pub fn alpha2(mut self, a: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.clf.alpha2 = Arc::new(a);
        self
    }

    /// One α3 shared by both sides.
    pub fn alpha3(mut self, a: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        let a: ScalarFn<T> = Arc::new(a);
        self.clf.alpha3_c = a.clone();
        self.clf.alpha3_d = a;
        self
    }

    /// Distinct α3 per side.
    pub fn alpha3_sides(
        mut self,
        flow: impl Fn(T) -> T + Send + Sync + 'static,
        jump: impl Fn(T) -> T + Send + Sync + 'static,
        mode: Alpha3Mode,
    ) -> Self {
        self.clf.alpha3_c = Arc::new(flow);
        self.clf.alpha3_d = Arc::new(jump);
        self.clf.alpha3_mode = mode;
        self
    }

    pub fn dist_to_target(mut self, d: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        self.clf.dist = Arc::new(d);
        self
    }

    /// Marks V nonsmooth; the gradient is only used where `region` holds.
    pub fn smoothness_region(mut self, region: impl Fn(&[T]) -> bool + Send + Sync + 'static) -> Self {
        self.clf.smooth = Some(Arc::new(region));
        self
    }

    pub fn flow_regime(mut self, regime: FlowRegime) -> Self {
        self.clf.flow_regime = regime;
        self
    }

    pub fn flow_cut(mut self, form: impl Fn(&[T]) -> ConstraintFn<T> + Send + Sync + 'static) -> Self {
        self.clf.cut_c = Some(Arc::new(form));
        self
    }

    pub fn jump_cut(mut self, form: impl Fn(&[T]) -> ConstraintFn<T> + Send + Sync + 'static) -> Self {
        self.clf.cut_d = Some(Arc::new(form));
        self
    }

    pub fn build(self) -> Clf<T> {
        self.clf
    }
}
