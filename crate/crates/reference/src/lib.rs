//! Deliberately naive models of the schedulers and the analyzer.
//!
//! Every model stores queues as `VecDeque`s of whole entries and recomputes
//! everything from scratch on each call. They share only the public data
//! types with `rtrlog-core`, never its algorithms, and exist to be compared
//! against it.

pub mod analyzer;
pub mod differential;
pub mod invariants;
pub mod scenarios;
pub mod schedulers;
pub mod workload;

pub use analyzer::{naive_availability, NaiveInstance, NaiveTask};
pub use differential::{check_analyzer, check_scenario, Checks};
pub use invariants::{InvariantMonitor, Policy};
pub use scenarios::{chatty_quiet, check_guarantee, guarantee_scenario, GuaranteeStats};
pub use schedulers::{outcome_key, OutcomeKey, RefEcetes, RefGfifo, RefLfifo, RefScheduler};
pub use workload::{random_scenario, random_snapshot, scenario_with, RandomScenario, RandomSnapshot};
