//! Bounded-memory logging for deterministic replay.
//!
//! The crate provides three eviction schedulers over a shared pool of
//! fixed-size records ([`Ecetes`], [`Gfifo`], [`Lfifo`]), an analyzer that
//! decides which replay starting points a log snapshot still supports, and
//! a seeded real-time trace simulator for comparing the schedulers.

pub mod analyzer;
pub mod baseline;
pub mod ecetes;
pub mod error;
mod pool;
pub mod scheduler;
pub mod sim;
pub mod types;

pub use analyzer::{
    control_flow_horizon, recommend_config, suggest_record_size, usable_starting_points, AnalyzeError,
    AvailabilityReport, QueueRole, RecordSizeError, RecordSizeWaste, RoleMap, StartingPointInstance, TaskAvailability,
    TaskMeta,
};
pub use baseline::{Gfifo, Lfifo, LfifoConfig};
pub use ecetes::Ecetes;
pub use error::{ConfigError, SchedulerError};
pub use scheduler::EvictionScheduler;
pub use types::*;
