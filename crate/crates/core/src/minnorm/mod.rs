//! Minimum-norm selection and the feedback laws built from it.

mod check;
mod controller;
mod oracle;
mod select;

pub use check::{check_min_norm, CheckPlan, CheckReport, SideStats, StateSampler};
pub use controller::{ClosedLoop, ControllerMode, MinNormController};
pub use oracle::{brute_force_oracle, brute_force_oracle_unbounded, OracleResult};
pub use select::{min_norm_select, SolverConfig};
