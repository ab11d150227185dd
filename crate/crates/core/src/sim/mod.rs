//! Scenario configuration, network state and the per-slot simulation engine.

pub mod check;
pub mod config;
pub mod engine;
pub mod output;
pub mod state;

pub use check::{check_slot, SlotDecision, Violation};
pub use config::{ArrivalMode, HandoverMode, ScenarioConfig, Warning};
pub use engine::{run_scenario, MetricsRecord, SimOptions, Simulation, SlotOutcome};
pub use state::{apply_fluctuation, NetworkState, Topology};
