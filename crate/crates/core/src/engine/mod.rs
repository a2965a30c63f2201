//! Fixed-step simulation loop.
//!
//! Each step computes E-IDM accelerations from the current state, applies a
//! ballistic update, moves vehicles across segment boundaries, evaluates
//! MOBIL lane changes (at most one per vehicle) and finally handles
//! arrivals at the entry boundaries.

mod config;
mod events;
mod metrics;
mod sim;
mod vehicle;

pub use config::{InflowSchedule, LcpsNormalization, SimulationConfig, TurnFractions};
pub use events::{write_events_csv, Event, EventKind};
pub use metrics::{CrashReport, DensityFlowSample, MetricsAccumulator, MetricsRecord};
pub use sim::{run_simulation, Simulation};
pub use vehicle::VehicleState;
