use thiserror::Error;

use crate::types::{QueueId, Ticks};

/// Rejected scheduler or pool setup.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("pool must hold at least one record")]
    EmptyPool,
    #[error("record payload size must be at least one byte")]
    ZeroRecordSize,
    #[error("at least one queue is required")]
    NoQueues,
    #[error("max_records_per_entry {max_records_per_entry} must be in 1..={pool_records}")]
    MaxRecordsOutOfRange {
        max_records_per_entry: usize,
        pool_records: usize,
    },
    #[error("expected {expected} queue configs, got {got}")]
    QueueCountMismatch { expected: usize, got: usize },
    #[error("queue id {0} is out of range or duplicated")]
    BadQueueId(QueueId),
    #[error("queue {queue_id}: msl {msl} exceeds pool of {pool_records} records")]
    MslTooLarge {
        queue_id: QueueId,
        msl: usize,
        pool_records: usize,
    },
    #[error("queue {0}: capacity must be at least one record")]
    ZeroCapacity(QueueId),
    #[error("queue capacities sum to {total}, pool holds {pool_records}")]
    CapacityOverflow { total: usize, pool_records: usize },
    #[error("task {0} needs at least one program point and non-empty checkpoints")]
    InvalidTask(u32),
    #[error("a checkpoint needs {needed} records but max_records_per_entry is {max}")]
    CheckpointTooLarge { needed: u64, max: usize },
}

/// Contract violations on an insertion or query.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedulerError {
    #[error("unknown queue {0}")]
    UnknownQueue(QueueId),
    #[error("timestamp {got} precedes the previous insertion at {last}")]
    TimestampRegression { last: Ticks, got: Ticks },
    #[error("checkpoint entries must carry task_id and program_point")]
    IncompleteCheckpoint,
}
