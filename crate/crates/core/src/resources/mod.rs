//! Per-slot resource optimizers: access bandwidth, UAV trajectories and computing allocation.

pub mod bandwidth;
pub mod compute;
pub mod trajectory;

pub use bandwidth::{allocate_bandwidth, BandwidthPlan, ServedVessel};
pub use compute::{allocate_compute, ComputePlan, PendingVessel};
pub use trajectory::{
    optimize_trajectories, optimize_trajectories_from, sca_step, AssociatedLink, TrajectoryIterate,
    TrajectoryOutcome, TrajectoryProblem,
};
