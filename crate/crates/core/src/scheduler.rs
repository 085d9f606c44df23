use crate::error::SchedulerError;
use crate::types::{EntryDescriptor, InsertOutcome, LogSnapshot, PoolConfig, QueueId, QueueStats, RecordSlot, Ticks};

/// Common surface of every eviction scheduler.
///
/// Instances are single-threaded; callers serialise all calls on one
/// instance. Instances are `Send` and share no state with each other.
pub trait EvictionScheduler: Send {
    fn name(&self) -> &'static str;

    fn pool(&self) -> &PoolConfig;

    /// Logs `entry`, evicting older entries if the policy requires it.
    fn insert_entry(&mut self, entry: &EntryDescriptor) -> Result<InsertOutcome, SchedulerError>;

    /// Per-queue entry sequences, oldest first, plus the drop counter.
    fn snapshot(&self, now: Ticks) -> LogSnapshot;

    fn queue_stats(&self, queue: QueueId) -> Result<QueueStats, SchedulerError>;

    /// Records not held by any queue.
    fn free_records(&self) -> usize;

    /// Insertions rejected for lack of an eligible victim.
    fn drop_count(&self) -> u64;

    /// Records in pool-index order.
    fn record_slots(&self) -> Vec<RecordSlot>;

    /// Walks the internal structure and reports the first inconsistency.
    fn audit(&self) -> Result<(), String>;
}

impl<S: EvictionScheduler + ?Sized> EvictionScheduler for Box<S> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn pool(&self) -> &PoolConfig {
        (**self).pool()
    }
    fn insert_entry(&mut self, entry: &EntryDescriptor) -> Result<InsertOutcome, SchedulerError> {
        (**self).insert_entry(entry)
    }
    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        (**self).snapshot(now)
    }
    fn queue_stats(&self, queue: QueueId) -> Result<QueueStats, SchedulerError> {
        (**self).queue_stats(queue)
    }
    fn free_records(&self) -> usize {
        (**self).free_records()
    }
    fn drop_count(&self) -> u64 {
        (**self).drop_count()
    }
    fn record_slots(&self) -> Vec<RecordSlot> {
        (**self).record_slots()
    }
    fn audit(&self) -> Result<(), String> {
        (**self).audit()
    }
}
