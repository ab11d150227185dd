//! Discrete-time simulator for a vessel / UAV / base-station / HAP / satellite
//! edge-computing network with backpressure offloading, anticipatory satellite
//! handover, and per-slot joint bandwidth, trajectory and computing allocation.

// `!(x > 0)` comparisons are deliberate: they treat NaN as "not positive".
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod model;
pub mod queueing;
pub mod resources;
pub mod scalar;
pub mod scheduler;
pub mod sim;

pub use baselines::SchedulerVariant;
pub use error::{Error, Result};
pub use scalar::{Amount, Real};
pub use sim::{run_scenario, MetricsRecord, ScenarioConfig, SimOptions};

/// Fluid-bit queue matrix.
pub type Queues = queueing::QueueMatrix<f64>;
/// Whole-bit queue matrix for exact conservation checks.
pub type ExactQueues = queueing::QueueMatrix<u64>;
pub type Position = model::Vec2<f64>;
pub type Graph = scheduler::graph::OffloadGraph<f64>;
pub type Trajectories = resources::TrajectoryProblem<f64>;
/// Fluid-bit simulation run.
pub type Simulator = sim::Simulation<f64>;
/// Whole-bit simulation run.
pub type ExactSimulator = sim::Simulation<u64>;
