//! Rotate-and-dissipate: rotations on a double cone, contracting jumps off its lower boundary.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::benchmarks::{feedback, sampler, uniform, unknown_key, Benchmark, Params, ReferenceLaws};
use crate::clf::{Clf, ConstraintFn, FeasibleSet};
use crate::error::{Error, Result};
use crate::hybrid::HybridSystem;
use crate::linalg::{norm, norm_sq};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotateParams<T> {
    pub omega: T,
    pub gamma: T,
}

impl<T: Scalar> Default for RotateParams<T> {
    fn default() -> Self {
        Self {
            omega: T::one(),
            gamma: T::lit(0.1),
        }
    }
}

impl<T: Scalar> RotateParams<T> {
    /// `exp(π/(2ω))`
    pub fn cone_gain(&self) -> T {
        (T::lit(FRAC_PI_2) / self.omega).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("omega = {} must be positive", self.omega)));
        }
        if !(self.gamma > T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("gamma = {} must be positive", self.gamma)));
        }
        let k = self.cone_gain() * self.gamma * self.gamma;
        if !(k < T::one()) {
            return Err(Error::ParamConstraintViolated(format!(
                "exp(pi/(2 omega)) gamma^2 = {k} must be < 1"
            )));
        }
        Ok(())
    }
}

impl<T: Scalar> Params for RotateParams<T> {
    const KEYS: &'static [&'static str] = &["omega", "gamma"];

    fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "omega" => self.omega = T::lit(value),
            "gamma" => self.gamma = T::lit(value),
            _ => return Err(unknown_key("rotate", key)),
        }
        Ok(())
    }
}

fn sgn<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

fn scale<T: Scalar>(x: &[T]) -> T {
    T::one().max(norm(x))
}

/// Signed membership of the cone `|x1| >= |x2|`.
pub fn cone_region<T: Scalar>(x: &[T]) -> T {
    (x[0].abs() - x[1].abs()) / scale(x)
}

/// Signed membership of the lower boundary ray pair `x2 = -|x1|`.
pub fn boundary_region<T: Scalar>(x: &[T]) -> T {
    (-x[1]).min(-(x[0].abs() + x[1]).abs()) / scale(x)
}

/// Time to reach the lower cone by rotation at rate ω; zero inside it and at the origin.
pub fn time_to_target<T: Scalar>(p: &RotateParams<T>, x: &[T]) -> T {
    if x[0] == T::zero() && x[1] == T::zero() {
        return T::zero();
    }
    let angle = x[1].atan2(x[0].abs()) + T::lit(FRAC_PI_4);
    angle.max(T::zero()).min(T::lit(FRAC_PI_2)) / p.omega
}

/// `(1/ω) asin((√2/2)(|x1| + x2)/|x|)`, the same function written on the cone.
pub fn time_to_target_asin<T: Scalar>(p: &RotateParams<T>, x: &[T]) -> T {
    let n = norm(x);
    if n == T::zero() {
        return T::zero();
    }
    let s = (T::lit(0.5).sqrt() * (x[0].abs() + x[1]) / n).max(-T::one()).min(T::one());
    s.asin().max(T::zero()) / p.omega
}

fn time_gradient<T: Scalar>(p: &RotateParams<T>, x: &[T]) -> Vec<T> {
    let n2 = norm_sq(x);
    if n2 == T::zero() || cone_region(x) < -T::lit(1e-9) {
        return vec![T::zero(), T::zero()];
    }
    let s = sgn(x[0]);
    vec![-s * x[1] / (p.omega * n2), s * x[0] / (p.omega * n2)]
}

pub fn lyapunov<T: Scalar>(p: &RotateParams<T>, x: &[T]) -> T {
    time_to_target(p, x).exp() * norm_sq(x)
}

pub fn decrease_rate<T: Scalar>(p: &RotateParams<T>) -> T {
    T::one() - p.cone_gain() * p.gamma * p.gamma
}

fn build_system<T: Scalar>(p: RotateParams<T>) -> Result<HybridSystem<T>> {
    let tol = T::lit(1e-9);
    let gamma = p.gamma;
    let omega = p.omega;
    let (sin, cos) = (T::lit(FRAC_PI_4).sin(), T::lit(FRAC_PI_4).cos());
    HybridSystem::builder(2, 1, 1)
        .flow_map(move |x: &[T], u: &[T]| vec![u[0] * omega * x[1], -u[0] * omega * x[0]])
        .jump_map_single(move |_, u| vec![sin * u[0], cos * u[0]])
        .flow_guard(|x, u| cone_region(x).min(-(u[0].abs() - T::one()).abs()))
        .jump_guard(move |x, u| boundary_region(x).min(u[0] - gamma * norm(x)))
        .flow_region(cone_region)
        .jump_region(boundary_region)
        .input_space_c(FeasibleSet::Finite(vec![vec![-T::one()], vec![T::one()]]))
        .input_space_d(FeasibleSet::full(1))
        .psi_c(move |x| {
            if cone_region(x) >= -tol {
                FeasibleSet::Finite(vec![vec![-T::one()], vec![T::one()]])
            } else {
                FeasibleSet::Empty
            }
        })
        .psi_d(move |x| {
            if boundary_region(x) >= -tol {
                FeasibleSet::interval(gamma * norm(x), T::infinity())
            } else {
                FeasibleSet::Empty
            }
        })
        .guard_tol(tol)
        .build()
}

fn build_clf<T: Scalar>(p: RotateParams<T>) -> Clf<T> {
    let gain = p.cone_gain();
    let rate = decrease_rate(&p);
    Clf::builder(
        move |x: &[T]| lyapunov(&p, x),
        move |x: &[T]| {
            let g = time_gradient(&p, x);
            let n2 = norm_sq(x);
            let e = time_to_target(&p, x).exp();
            vec![e * (n2 * g[0] + T::lit(2.0) * x[0]), e * (n2 * g[1] + T::lit(2.0) * x[1])]
        },
    )
    .alpha1(|s| s * s)
    .alpha2(move |s| gain * s * s)
    .alpha3(move |s| rate * s * s)
    // on the cone ⟨∇V, f(x, u)⟩ = −sign(x1) V(x) u
    .flow_cut(move |x| ConstraintFn::Affine {
        offset: rate * norm_sq(x),
        slope: vec![-sgn(x[0]) * lyapunov(&p, x)],
    })
    // V(g(x, u)) = e^{π/(2ω)} u² for u >= 0
    .jump_cut(move |x| ConstraintFn::Quadratic1D {
        axis: 0,
        a: gain,
        b: T::zero(),
        c: -lyapunov(&p, x) + rate * norm_sq(x),
    })
    .build()
}

/// Builds the benchmark after checking `exp(π/(2ω)) γ² < 1`.
pub fn make_rotate_dissipate<T: Scalar>(p: RotateParams<T>) -> Result<Benchmark<T>> {
    p.validate()?;
    make_rotate_dissipate_unchecked(p)
}

/// Same construction without the parameter check.
pub fn make_rotate_dissipate_unchecked<T: Scalar>(p: RotateParams<T>) -> Result<Benchmark<T>> {
    let system = build_system(p)?;
    let clf = build_clf(p);
    let gamma = p.gamma;
    let three = T::lit(3.0);
    Ok(Benchmark {
        name: "rotate",
        system,
        clf,
        reference: ReferenceLaws {
            // x1 = 0 is unassigned by the case split; the lexicographic tie-break gives −1
            flow: feedback(|x: &[T]| vec![if x[0] > T::zero() { T::one() } else { -T::one() }]),
            jump: feedback(move |x: &[T]| vec![gamma * norm(x)]),
        },
        rest: ReferenceLaws {
            flow: feedback(|_: &[T]| vec![T::one()]),
            jump: feedback(|_: &[T]| vec![T::zero()]),
        },
        verify_lower: vec![-three, -three],
        verify_upper: vec![three, three],
        verify_exclude: None,
        flow_sampler: Some(sampler(|rng| {
            let r = uniform(rng, T::lit(0.05), T::lit(3.0));
            let phi = uniform(rng, -T::lit(FRAC_PI_4), T::lit(FRAC_PI_4));
            let side = if uniform(rng, T::zero(), T::one()) < T::lit(0.5) { -T::one() } else { T::one() };
            vec![side * r * phi.cos(), r * phi.sin()]
        })),
        jump_sampler: Some(sampler(|rng| {
            let s = uniform(rng, T::lit(0.05), T::lit(3.0));
            let side = if uniform(rng, T::zero(), T::one()) < T::lit(0.5) { -T::one() } else { T::one() };
            vec![side * s, -s]
        })),
        default_x0: vec![T::lit(2.0), T::lit(0.9)],
        default_r: T::lit(0.15),
    })
}

/// V(x) = |x|² with a fixed positive α3; on a system with `exp(π/(2ω)) γ² >= 1` the jump
/// inequality fails.
pub fn broken_clf<T: Scalar>() -> Clf<T> {
    Clf::builder(|x: &[T]| norm_sq(x), |x: &[T]| vec![T::lit(2.0) * x[0], T::lit(2.0) * x[1]])
        .alpha3(|s| T::lit(0.5) * s * s)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_on_positive_axis() {
        let p = RotateParams::<f64>::default();
        let v = lyapunov(&p, &[1.0, 0.0]);
        assert!((v - FRAC_PI_4.exp()).abs() < 1e-14);
    }

    #[test]
    fn atan_and_asin_forms_agree_on_cone() {
        let p = RotateParams::<f64> { omega: 1.7, gamma: 0.1 };
        for i in 0..200 {
            let phi = -FRAC_PI_4 + FRAC_PI_2 * (i as f64) / 199.0;
            for side in [-1.0, 1.0] {
                let x = [side * 1.3 * phi.cos(), 1.3 * phi.sin()];
                let a = time_to_target(&p, &x);
                let b = time_to_target_asin(&p, &x);
                assert!((a - b).abs() < 1e-7, "{x:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lower_cone_has_zero_time() {
        let p = RotateParams::<f64>::default();
        for x in [[0.0, -1.0], [0.3, -2.0], [-1.0, -1.0], [0.0, 0.0]] {
            assert_eq!(time_to_target(&p, &x), 0.0);
            assert_eq!(lyapunov(&p, &x), norm_sq(&x));
        }
    }

    #[test]
    fn parameter_guard() {
        assert!(make_rotate_dissipate(RotateParams { omega: 1.0, gamma: 1.0 }).is_err());
        assert!(make_rotate_dissipate(RotateParams::<f64>::default()).is_ok());
    }
}
