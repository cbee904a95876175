//! Pendulum with a controlled impact surface.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::benchmarks::{feedback, sampler, uniform, unknown_key, Benchmark, Params, ReferenceLaws};
use crate::clf::{Alpha3Mode, Bounds, Clf, ConstraintFn, FeasibleSet};
use crate::error::{Error, Result};
use crate::hybrid::HybridSystem;
use crate::linalg::{linspace, norm_sq};
use crate::Scalar;

/// `s ↦ slope·s + offset`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap<T> {
    pub slope: T,
    pub offset: T,
}

impl<T: Scalar> AffineMap<T> {
    pub fn eval(&self, s: T) -> T {
        self.slope * s + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams<T> {
    /// Gravity coefficient.
    pub a: T,
    /// Friction coefficient.
    pub b: T,
    /// Surface-angle dependent position factor ρ̃, valued in (−1, 0).
    pub rho: AffineMap<T>,
    /// Restitution e, valued in [0, 1).
    pub restitution: AffineMap<T>,
}

impl<T: Scalar> Default for PendulumParams<T> {
    fn default() -> Self {
        Self {
            a: T::one(),
            b: T::lit(0.1),
            rho: AffineMap {
                slope: T::lit(0.5),
                offset: T::lit(-0.1),
            },
            restitution: AffineMap {
                slope: T::lit(-0.28),
                offset: T::lit(0.5),
            },
        }
    }
}

impl<T: Scalar> Params for PendulumParams<T> {
    const KEYS: &'static [&'static str] = &["a", "b", "rho_slope", "rho_offset", "e_slope", "e_offset"];

    fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let v = T::lit(value);
        match key {
            "a" => self.a = v,
            "b" => self.b = v,
            "rho_slope" => self.rho.slope = v,
            "rho_offset" => self.rho.offset = v,
            "e_slope" => self.restitution.slope = v,
            "e_offset" => self.restitution.offset = v,
            _ => return Err(unknown_key("pendulum", key)),
        }
        Ok(())
    }
}

const LAMBDA_GRID: usize = 10_000;

impl<T: Scalar> PendulumParams<T> {
    /// `min over s ∈ [−π/2, 0] of min{2(1 − (1 + ρ̃(s))²), 1 − e(s)²}` on a grid.
    pub fn lambda(&self) -> T {
        linspace(-T::lit(FRAC_PI_2), T::zero(), LAMBDA_GRID)
            .into_iter()
            .map(|s| {
                let p = T::one() + self.rho.eval(s);
                let e = self.restitution.eval(s);
                (T::lit(2.0) * (T::one() - p * p)).min(T::one() - e * e)
            })
            .fold(T::infinity(), T::min)
    }

    pub fn validate(&self) -> Result<T> {
        if !(self.a > T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("a = {} must be positive", self.a)));
        }
        if !(self.b >= T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("b = {} must be nonnegative", self.b)));
        }
        for s in [-T::lit(FRAC_PI_2), T::zero()] {
            let r = self.rho.eval(s);
            if !(r > -T::one() && r < T::zero()) {
                return Err(Error::ParamConstraintViolated(format!("rho({s}) = {r} must lie in (-1, 0)")));
            }
            let e = self.restitution.eval(s);
            if !(e >= T::zero() && e < T::one()) {
                return Err(Error::ParamConstraintViolated(format!("e({s}) = {e} must lie in [0, 1)")));
            }
        }
        // steeper surfaces restitute at least as much
        if self.restitution.slope > T::zero() {
            return Err(Error::ParamConstraintViolated(
                "e must not increase with the surface angle".into(),
            ));
        }
        let lambda = self.lambda();
        if !(lambda > T::zero()) {
            return Err(Error::ParamConstraintViolated(format!("lambda = {lambda} must be positive")));
        }
        Ok(lambda)
    }
}

/// Decomposition `⟨∇V(x), f(x, u)⟩ + λ|x|² = ψ0(x) + ψ1(x) u1`.
pub fn psi<T: Scalar>(p: &PendulumParams<T>, lambda: T, x: &[T]) -> (T, T) {
    let (x1, x2) = (x[0], x[1]);
    let two = T::lit(2.0);
    let drift = -p.a * x1.sin() - p.b * x2;
    let psi0 = T::lit(4.0) * x1 * x2 + two * x2 * x2 + two * drift * (x2 + x1) + lambda * norm_sq(x);
    (psi0, two * (x1 + x2))
}

pub fn lyapunov<T: Scalar>(x: &[T]) -> T {
    T::lit(2.0) * x[0] * x[0] + T::lit(2.0) * x[0] * x[1] + x[1] * x[1]
}

fn surface_upper<T: Scalar>(x1: T) -> T {
    x1.min(T::zero()).max(-T::lit(FRAC_PI_2))
}

fn flow_region<T: Scalar>(x: &[T]) -> T {
    (x[0] + T::lit(FRAC_PI_2)).min(T::lit(PI) - x[0])
}

fn jump_region<T: Scalar>(x: &[T]) -> T {
    (-x[0]).min(-x[1])
}

/// Coefficients of `u ↦ V(g(x, u)) − V(x) + λ|x|²`, exact since ρ̃ and e are affine.
pub fn jump_quadratic<T: Scalar>(p: &PendulumParams<T>, lambda: T, x: &[T]) -> (T, T, T) {
    let (x1, x2) = (x[0], x[1]);
    let two = T::lit(2.0);
    let p0 = T::one() + p.rho.offset;
    let p1 = p.rho.slope;
    let (e0, e1) = (p.restitution.offset, p.restitution.slope);
    // g = (p x1, −q x2) with p = p0 + p1 u, q = e0 + e1 u
    let a = two * x1 * x1 * p1 * p1 - two * x1 * x2 * p1 * e1 + x2 * x2 * e1 * e1;
    let b = T::lit(4.0) * x1 * x1 * p0 * p1 - two * x1 * x2 * (p0 * e1 + p1 * e0) + two * x2 * x2 * e0 * e1;
    let c = two * x1 * x1 * p0 * p0 - two * x1 * x2 * p0 * e0 + x2 * x2 * e0 * e0 - lyapunov(x) + lambda * norm_sq(x);
    (a, b, c)
}

pub fn make_pendulum<T: Scalar>(p: PendulumParams<T>) -> Result<Benchmark<T>> {
    let lambda = p.validate()?;
    let tol = T::lit(1e-9);
    let half_pi = T::lit(FRAC_PI_2);
    let system = HybridSystem::builder(2, 2, 1)
        .flow_map(move |x: &[T], u: &[T]| vec![x[1], -p.a * x[0].sin() - p.b * x[1] + u[0]])
        .jump_map_single(move |x, u| {
            vec![(T::one() + p.rho.eval(u[0])) * x[0], -p.restitution.eval(u[0]) * x[1]]
        })
        .flow_guard(move |x, u| {
            flow_region(x)
                .min(x[0] - u[1])
                .min(u[1] + half_pi)
                .min(-u[1])
        })
        .jump_guard(move |x, u| (u[0] - x[0]).min(-x[1]).min(u[0] + half_pi).min(-u[0]))
        .flow_region(flow_region)
        .jump_region(jump_region)
        .input_space_c(FeasibleSet::Box(Bounds::new(
            vec![T::neg_infinity(), -half_pi],
            vec![T::infinity(), T::zero()],
        )))
        .input_space_d(FeasibleSet::interval(-half_pi, T::zero()))
        .psi_c(move |x| {
            if flow_region(x) >= -tol {
                FeasibleSet::Box(Bounds::new(
                    vec![T::neg_infinity(), -half_pi],
                    vec![T::infinity(), surface_upper(x[0])],
                ))
            } else {
                FeasibleSet::Empty
            }
        })
        .psi_d(move |x| {
            if jump_region(x) >= -tol {
                FeasibleSet::interval(x[0].max(-half_pi).min(T::zero()), T::zero())
            } else {
                FeasibleSet::Empty
            }
        })
        .guard_tol(tol)
        .build()?;

    let l_min = T::lit((3.0 - 5f64.sqrt()) / 2.0);
    let l_max = T::lit((3.0 + 5f64.sqrt()) / 2.0);
    let clf = Clf::builder(lyapunov, |x: &[T]| {
        let two = T::lit(2.0);
        vec![T::lit(4.0) * x[0] + two * x[1], two * x[0] + two * x[1]]
    })
    .alpha1(move |s| l_min * s * s)
    .alpha2(move |s| l_max * s * s)
    .alpha3_sides(|s| s * s, move |s| lambda * s * s, Alpha3Mode::Common)
    .flow_cut(move |x| {
        let (psi0, psi1) = psi(&p, lambda, x);
        ConstraintFn::Affine {
            offset: psi0,
            slope: vec![psi1, T::zero()],
        }
    })
    .jump_cut(move |x| {
        let (a, b, c) = jump_quadratic(&p, lambda, x);
        ConstraintFn::Quadratic1D { axis: 0, a, b, c }
    })
    .build();

    let margin = T::lit(1e-3);
    Ok(Benchmark {
        name: "pendulum",
        system,
        clf,
        reference: ReferenceLaws {
            flow: feedback(move |x: &[T]| {
                let (psi0, psi1) = psi(&p, lambda, x);
                let u1 = if psi0 > T::zero() { -psi0 / psi1 } else { T::zero() };
                vec![u1, surface_upper(x[0])]
            }),
            jump: feedback(|_: &[T]| vec![T::zero()]),
        },
        rest: ReferenceLaws {
            flow: feedback(|x: &[T]| vec![T::zero(), surface_upper(x[0])]),
            jump: feedback(|_: &[T]| vec![T::zero()]),
        },
        verify_lower: vec![-half_pi, -T::lit(10.0)],
        verify_upper: vec![T::lit(PI), T::lit(10.0)],
        verify_exclude: Some(std::sync::Arc::new(move |x: &[T]| (x[0] + x[1]).abs() < margin)),
        flow_sampler: Some(sampler(move |rng| loop {
            let x = vec![uniform(rng, -half_pi, T::lit(PI)), uniform(rng, -T::lit(10.0), T::lit(10.0))];
            if (x[0] + x[1]).abs() >= margin {
                return x;
            }
        })),
        jump_sampler: Some(sampler(move |rng| {
            vec![uniform(rng, -half_pi, T::zero()), uniform(rng, -T::lit(10.0), T::zero())]
        })),
        default_x0: vec![T::lit(2.0), -T::lit(10.0)],
        default_r: T::lit(0.0015),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_is_restitution_limited() {
        let p = PendulumParams::<f64>::default();
        let e = 0.5 + 0.28 * FRAC_PI_2;
        assert!((p.lambda() - (1.0 - e * e)).abs() < 1e-6);
    }

    #[test]
    fn quadratic_matches_direct_jump_evaluation() {
        let p = PendulumParams::<f64>::default();
        let lambda = p.lambda();
        let x = [-0.5, -1.0];
        let (a, b, c) = jump_quadratic(&p, lambda, &x);
        for u in [-0.5, -0.3, -0.1, 0.0] {
            let g = [(1.0 + p.rho.eval(u)) * x[0], -p.restitution.eval(u) * x[1]];
            let direct = lyapunov(&g) - lyapunov(&x) + lambda * norm_sq(&x);
            assert!((a * u * u + b * u + c - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn psi1_at_ones() {
        let p = PendulumParams::<f64>::default();
        assert_eq!(psi(&p, p.lambda(), &[1.0, 1.0]).1, 4.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = PendulumParams::<f64> {
            a: 0.0,
            ..Default::default()
        };
        assert!(make_pendulum(p).is_err());
        let p = PendulumParams::<f64> {
            b: -0.1,
            ..Default::default()
        };
        assert!(make_pendulum(p).is_err());
        let mut p = PendulumParams::<f64>::default();
        p.restitution.offset = 1.2;
        assert!(make_pendulum(p).is_err());
    }
}
