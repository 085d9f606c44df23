//! Data model shared by every scheduler: pool geometry, per-queue
//! properties, entry descriptors and the post-mortem log snapshot.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Ticks of the abstract, caller-supplied clock.
pub type Ticks = u64;

/// Index of a queue inside one scheduler, in `[0, queue_count)`.
pub type QueueId = usize;

/// Setup parameters of the shared record pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Number of records in the pool.
    pub pool_records: usize,
    /// Payload capacity of a single record, in bytes.
    pub record_payload_bytes: u64,
    /// Largest number of records a single entry may span.
    pub max_records_per_entry: usize,
    /// Number of queues sharing the pool.
    pub queue_count: usize,
}

impl PoolConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pool_records == 0 {
            return Err(ConfigError::EmptyPool);
        }
        if self.record_payload_bytes == 0 {
            return Err(ConfigError::ZeroRecordSize);
        }
        if self.queue_count == 0 {
            return Err(ConfigError::NoQueues);
        }
        if self.max_records_per_entry == 0 || self.max_records_per_entry > self.pool_records {
            return Err(ConfigError::MaxRecordsOutOfRange {
                max_records_per_entry: self.max_records_per_entry,
                pool_records: self.pool_records,
            });
        }
        Ok(())
    }

    /// Records needed for a payload: `max(1, ceil(bytes / record_size))`.
    pub fn records_for(&self, payload_bytes: u64) -> u64 {
        payload_bytes.div_ceil(self.record_payload_bytes).max(1)
    }
}

/// Per-queue eviction properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueConfig {
    pub queue_id: QueueId,
    /// Minimum temporal span: records younger than this many ticks are never evicted.
    pub mtl: Ticks,
    /// Minimum spatial span: records that must remain after any eviction.
    pub msl: usize,
    /// Queue priority; the smallest value is the first to be victimised.
    pub qp: i32,
}

impl QueueConfig {
    pub fn new(queue_id: QueueId) -> Self {
        Self {
            queue_id,
            mtl: 0,
            msl: 0,
            qp: 0,
        }
    }
}

/// Whether an entry describes control flow or data flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flow {
    ControlFlow,
    DataFlow,
}

/// The monitored event type carried by an entry.
///
/// The declaration order is the tie-break rank used when events share a tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntryKind {
    #[serde(rename = "cs")]
    ContextSwitch,
    #[serde(rename = "exc")]
    Exception,
    #[serde(rename = "irq")]
    Interrupt,
    #[serde(rename = "ckpt")]
    Checkpoint,
    #[serde(rename = "input")]
    Input,
}

impl EntryKind {
    pub const ALL: [EntryKind; 5] = [
        EntryKind::ContextSwitch,
        EntryKind::Exception,
        EntryKind::Interrupt,
        EntryKind::Checkpoint,
        EntryKind::Input,
    ];

    pub fn flow(self) -> Flow {
        match self {
            EntryKind::ContextSwitch | EntryKind::Exception | EntryKind::Interrupt => Flow::ControlFlow,
            EntryKind::Checkpoint | EntryKind::Input => Flow::DataFlow,
        }
    }

    pub fn rank(self) -> u8 {
        self as u8
    }

    /// Short tag used by the trace and snapshot formats.
    pub fn tag(self) -> &'static str {
        match self {
            EntryKind::ContextSwitch => "cs",
            EntryKind::Exception => "exc",
            EntryKind::Interrupt => "irq",
            EntryKind::Checkpoint => "ckpt",
            EntryKind::Input => "input",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

/// One monitored event handed to a scheduler for logging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryDescriptor {
    pub target_queue: QueueId,
    pub kind: EntryKind,
    pub timestamp: Ticks,
    pub payload_bytes: u64,
    pub task_id: Option<u32>,
    /// Starting-point index within the task; required on checkpoints.
    pub program_point: Option<u32>,
    /// Job the event belongs to; lets the analyzer chain program points.
    pub job_index: Option<u64>,
}

impl EntryDescriptor {
    pub fn new(target_queue: QueueId, kind: EntryKind, timestamp: Ticks, payload_bytes: u64) -> Self {
        Self {
            target_queue,
            kind,
            timestamp,
            payload_bytes,
            task_id: None,
            program_point: None,
            job_index: None,
        }
    }

    pub fn checkpoint(
        target_queue: QueueId,
        timestamp: Ticks,
        payload_bytes: u64,
        task_id: u32,
        program_point: u32,
        job_index: u64,
    ) -> Self {
        Self {
            target_queue,
            kind: EntryKind::Checkpoint,
            timestamp,
            payload_bytes,
            task_id: Some(task_id),
            program_point: Some(program_point),
            job_index: Some(job_index),
        }
    }

    pub fn with_task(mut self, task_id: u32, job_index: u64) -> Self {
        self.task_id = Some(task_id);
        self.job_index = Some(job_index);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InsertStatus {
    Accepted,
    RejectedTooLarge,
    RejectedNoEligibleVictim,
}

/// An entry removed from the log to make room for another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eviction {
    pub queue_id: QueueId,
    pub entry_seq: u64,
}

/// Result of one insertion call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertOutcome {
    pub status: InsertStatus,
    /// Sequence number given to the entry, when accepted.
    pub seq: Option<u64>,
    /// Entries evicted by this call, oldest first. Empty unless accepted.
    pub evicted: Vec<Eviction>,
    /// Abstract cost of the call.
    pub steps: u64,
}

impl InsertOutcome {
    pub fn is_accepted(&self) -> bool {
        self.status == InsertStatus::Accepted
    }
}

/// Length and age summary of one queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueStats {
    pub length: usize,
    pub entry_count: usize,
    pub oldest_ts: Option<Ticks>,
    pub youngest_ts: Option<Ticks>,
}

/// Which list currently owns a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Holder {
    Free,
    Queue(QueueId),
}

/// Read-only view of one pool record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordSlot {
    pub slot_index: usize,
    pub holding_queue: Holder,
    pub entry_seq: Option<u64>,
    pub segment_index: usize,
    pub prev: Option<usize>,
    pub next: Option<usize>,
}

/// One entry as it appears in a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrySummary {
    pub seq: u64,
    pub kind: EntryKind,
    pub ts: Ticks,
    pub size: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pp: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub job: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueSnapshot {
    pub id: QueueId,
    /// Old-to-young order.
    pub entries: Vec<EntrySummary>,
}

/// The log contents frozen at an instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSnapshot {
    pub taken_at: Ticks,
    pub queues: Vec<QueueSnapshot>,
    pub drop_count: u64,
}

impl LogSnapshot {
    pub fn queue(&self, id: QueueId) -> Option<&QueueSnapshot> {
        self.queues.iter().find(|q| q.id == id)
    }

    pub fn entries(&self) -> impl Iterator<Item = (QueueId, &EntrySummary)> {
        self.queues
            .iter()
            .flat_map(|q| q.entries.iter().map(move |e| (q.id, e)))
    }
}
