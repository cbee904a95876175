//! Pointwise minimum-norm control synthesis for hybrid systems from control Lyapunov
//! functions, with a hybrid-time simulator and three benchmark systems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod clf;
pub mod error;
pub mod hybrid;
pub mod linalg;
pub mod minnorm;
mod scalar;

pub use clf::{
    admissible_set, feasible_inputs, gamma, upsilon, verify_clf, AdmissibleMode, Alpha3Mode, Bounds, Clf,
    ConstraintFn, ExtReal, FeasibleSet, FlowRegime, GridPlan, VerifyReport,
};
pub use error::{Error, Result, Side};
pub use hybrid::{
    integrate_flow_interval, simulate, ClosedLoopControl, FlowExit, FlowOptions, HybridSystem, HybridTimeDomain,
    HybridTrajectory, Priority, SimOptions, Termination,
};
pub use minnorm::{
    brute_force_oracle, brute_force_oracle_unbounded, check_min_norm, min_norm_select, CheckPlan, CheckReport,
    ClosedLoop, ControllerMode, MinNormController, OracleResult, SideStats, SolverConfig, StateSampler,
};
pub use benchmarks::{
    make_pendulum, make_rotate_dissipate, make_timers, Benchmark, PendulumParams, ReferenceLaws, RotateParams,
    TimersParams,
};
pub use scalar::{lit, Scalar};

pub type HybridSystemF64 = HybridSystem<f64>;
pub type HybridSystemF32 = HybridSystem<f32>;
pub type ClfF64 = Clf<f64>;
pub type ClfF32 = Clf<f32>;
pub type FeasibleSetF64 = FeasibleSet<f64>;
pub type FeasibleSetF32 = FeasibleSet<f32>;
pub type HybridTrajectoryF64 = HybridTrajectory<f64>;
pub type SimOptionsF64 = SimOptions<f64>;
pub type MinNormControllerF64 = MinNormController<f64>;
pub type MinNormControllerF32 = MinNormController<f32>;
pub type BenchmarkF64 = Benchmark<f64>;
