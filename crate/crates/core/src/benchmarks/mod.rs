//! The three benchmark systems with their CLFs, closed-form input maps and reference laws.

pub mod pendulum;
pub mod rotate;
pub mod timers;

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::clf::{Clf, Exclusion, GridPlan};
use crate::error::{Error, Result};
use crate::hybrid::{Feedback, HybridSystem};
use crate::minnorm::{CheckPlan, ControllerMode, StateSampler};
use crate::Scalar;

pub use pendulum::{make_pendulum, AffineMap, PendulumParams};
pub use rotate::{make_rotate_dissipate, RotateParams};
pub use timers::{make_timers, TimersParams};

/// Registered minimum-norm laws derived by hand for a benchmark.
#[derive(Clone)]
pub struct ReferenceLaws<T> {
    pub flow: Feedback<T>,
    pub jump: Feedback<T>,
}

/// A benchmark system bundled with everything the checks need.
#[derive(Clone)]
pub struct Benchmark<T> {
    pub name: &'static str,
    pub system: HybridSystem<T>,
    pub clf: Clf<T>,
    pub reference: ReferenceLaws<T>,
    /// Forward-invariance laws for the global variant.
    pub rest: ReferenceLaws<T>,
    pub verify_lower: Vec<T>,
    pub verify_upper: Vec<T>,
    pub verify_exclude: Option<Exclusion<T>>,
    pub flow_sampler: Option<StateSampler<T>>,
    pub jump_sampler: Option<StateSampler<T>>,
    pub default_x0: Vec<T>,
    pub default_r: T,
}

impl<T: Scalar> std::fmt::Debug for Benchmark<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Benchmark")
            .field("name", &self.name)
            .field("default_x0", &self.default_x0)
            .field("default_r", &self.default_r)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Benchmark<T> {
    pub fn grid_plan(&self, n: usize) -> GridPlan<T> {
        GridPlan {
            lower: self.verify_lower.clone(),
            upper: self.verify_upper.clone(),
            n,
            exclude: self.verify_exclude.clone(),
            flow_witnesses: vec![self.reference.flow.clone()],
            jump_witnesses: vec![self.reference.jump.clone()],
        }
    }

    pub fn check_plan(&self, samples: usize, oracle_samples: usize, seed: u64) -> CheckPlan<T> {
        CheckPlan {
            flow_sampler: self.flow_sampler.clone(),
            jump_sampler: self.jump_sampler.clone(),
            flow_reference: Some(self.reference.flow.clone()),
            jump_reference: Some(self.reference.jump.clone()),
            ..CheckPlan::new(samples, oracle_samples, seed)
        }
    }

    pub fn global_mode(&self) -> ControllerMode<T> {
        ControllerMode::Global {
            flow_rest: self.rest.flow.clone(),
            jump_rest: self.rest.jump.clone(),
        }
    }
}

/// Parameter structs settable from `key = value` overrides.
pub trait Params: Sized {
    const KEYS: &'static [&'static str];
    fn set(&mut self, key: &str, value: f64) -> Result<()>;
}

pub(crate) fn unknown_key(system: &str, key: &str) -> Error {
    Error::InvalidArgument(format!("unknown parameter '{key}' for system '{system}'"))
}

pub(crate) fn uniform<T: Scalar>(rng: &mut ChaCha8Rng, lo: T, hi: T) -> T {
    lo + (hi - lo) * T::lit(rng.gen::<f64>())
}

pub(crate) fn sampler<T: Scalar>(f: impl Fn(&mut ChaCha8Rng) -> Vec<T> + Send + Sync + 'static) -> StateSampler<T> {
    Arc::new(f)
}

pub(crate) fn feedback<T: Scalar>(f: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static) -> Feedback<T> {
    Arc::new(f)
}
