//! Hybrid systems, hybrid time domains and closed-loop simulation.

mod domain;
mod flow;
mod simulate;
mod system;

pub use domain::{HybridTimeDomain, HybridTrajectory, JumpRecord, Phase, Sample, Termination};
pub use flow::{integrate_flow_interval, FlowExit, FlowOptions, FlowSegment};
pub use simulate::{simulate, ClosedLoopControl, Priority, SimOptions};
pub use system::{Feedback, FlowMap, Guard, HybridSystem, HybridSystemBuilder, InputMap, JumpMap, Region};
