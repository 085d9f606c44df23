//! Seeded trace generation for periodic and sporadic task sets, and the
//! harness that feeds traces to a scheduler and samples crash instants.

pub mod drive;
pub mod format;
pub mod metrics;
pub mod trace;

pub use drive::{drive, entry_for, route, DriveError, RunLog};
pub use format::{format_event, parse_trace, trace_to_string, write_trace, TraceParseError};
pub use metrics::{
    sample_crash_metrics, sample_snapshots, LfifoPolicy, MetricsReport, SampledRun, ScenarioConfig, SchedulerChoice,
    SimError, TaskMetrics,
};
pub use trace::{
    generate_trace, Activation, InputSpec, ProgramPointSpec, SpecError, SplitMix64, TaskSpec, TraceEvent,
    CONTEXT_SWITCH_BYTES,
};
