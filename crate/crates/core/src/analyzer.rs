//! Starting-point availability over a log snapshot.
//!
//! A checkpoint instance `(task, program point k, job j)` is usable when the
//! checkpoint is still in the log, control flow is known contiguously from
//! its timestamp onward, and (for `k > 0`) the instance `(task, k - 1, j)` of
//! the same job is usable too.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ConfigError;
use crate::types::{EntryKind, LogSnapshot, PoolConfig, QueueConfig, QueueId, Ticks};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("snapshot has no queue {0} to read control flow from")]
    MissingControlFlowQueue(QueueId),
    #[error("checkpoint entry {seq} lacks task, program point or job")]
    IncompleteCheckpoint { seq: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordSizeError {
    #[error("entry size histogram is empty")]
    EmptyHistogram,
    #[error("no candidate record sizes given")]
    NoCandidates,
    #[error("candidate record size must be positive")]
    ZeroCandidate,
}

/// Static description of one task's starting points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskMeta {
    pub task_id: u32,
    /// Checkpoint size of each program point, indexed by program point.
    pub checkpoint_bytes: Vec<u64>,
}

impl TaskMeta {
    pub fn program_points(&self) -> u32 {
        self.checkpoint_bytes.len() as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartingPointInstance {
    pub task_id: u32,
    pub program_point: u32,
    pub job_index: u64,
    pub checkpoint_seq: u64,
    pub checkpoint_ts: Ticks,
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskAvailability {
    pub task_id: u32,
    /// Checkpoint instances found in the snapshot, by (program point, job, seq).
    pub instances: Vec<StartingPointInstance>,
    pub guaranteed_start_ts: Option<Ticks>,
    pub replay_window: Option<Ticks>,
}

impl TaskAvailability {
    pub fn usable_count(&self) -> usize {
        self.instances.iter().filter(|i| i.usable).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvailabilityReport {
    pub taken_at: Ticks,
    pub control_flow_horizon: Option<Ticks>,
    pub tasks: Vec<TaskAvailability>,
}

/// Timestamp of the oldest entry in the control-flow queue.
pub fn control_flow_horizon(snap: &LogSnapshot, cf_queue: QueueId) -> Result<Option<Ticks>, AnalyzeError> {
    let q = snap
        .queue(cf_queue)
        .ok_or(AnalyzeError::MissingControlFlowQueue(cf_queue))?;
    Ok(q.entries.first().map(|e| e.ts))
}

pub fn usable_starting_points(
    snap: &LogSnapshot,
    tasks: &[TaskMeta],
    cf_queue: QueueId,
) -> Result<AvailabilityReport, AnalyzeError> {
    let horizon = control_flow_horizon(snap, cf_queue)?;
    let wanted: BTreeSet<u32> = tasks.iter().map(|t| t.task_id).collect();

    let mut found: BTreeMap<u32, Vec<StartingPointInstance>> = BTreeMap::new();
    for (_, e) in snap.entries() {
        if e.kind != EntryKind::Checkpoint {
            continue;
        }
        let (Some(task), Some(pp), Some(job)) = (e.task, e.pp, e.job) else {
            return Err(AnalyzeError::IncompleteCheckpoint { seq: e.seq });
        };
        if !wanted.contains(&task) {
            continue;
        }
        found.entry(task).or_default().push(StartingPointInstance {
            task_id: task,
            program_point: pp,
            job_index: job,
            checkpoint_seq: e.seq,
            checkpoint_ts: e.ts,
            usable: false,
        });
    }

    let mut report = Vec::with_capacity(tasks.len());
    for meta in tasks {
        let mut instances = found.remove(&meta.task_id).unwrap_or_default();
        // Program points ascending, so each chain predecessor is decided first.
        instances.sort_by_key(|i| (i.program_point, i.job_index, i.checkpoint_seq));
        let mut usable: BTreeSet<(u32, u64)> = BTreeSet::new();
        for inst in &mut instances {
            let covered = horizon.is_some_and(|h| inst.checkpoint_ts >= h);
            let chained = inst.program_point == 0 || usable.contains(&(inst.program_point - 1, inst.job_index));
            inst.usable = covered && chained;
            if inst.usable {
                usable.insert((inst.program_point, inst.job_index));
            }
        }
        let guaranteed_start_ts = instances.iter().filter(|i| i.usable).map(|i| i.checkpoint_ts).min();
        report.push(TaskAvailability {
            task_id: meta.task_id,
            instances,
            guaranteed_start_ts,
            replay_window: guaranteed_start_ts.map(|ts| snap.taken_at.saturating_sub(ts)),
        });
    }
    Ok(AvailabilityReport {
        taken_at: snap.taken_at,
        control_flow_horizon: horizon,
        tasks: report,
    })
}

/// Purpose of a queue in the recommended layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueRole {
    ControlFlow,
    DataFlow { task_id: u32, program_point: u32 },
}

/// Queue index -> role, plus the lookups the trace driver needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleMap {
    pub roles: Vec<QueueRole>,
}

impl RoleMap {
    pub fn control_flow_queue(&self) -> Option<QueueId> {
        self.roles.iter().position(|r| *r == QueueRole::ControlFlow)
    }

    pub fn checkpoint_queue(&self, task_id: u32, program_point: u32) -> Option<QueueId> {
        self.roles
            .iter()
            .position(|r| *r == QueueRole::DataFlow { task_id, program_point })
    }

    /// Inputs of a task share the queue of its last program point.
    pub fn input_queue(&self, task_id: u32) -> Option<QueueId> {
        self.roles
            .iter()
            .rposition(|r| matches!(r, QueueRole::DataFlow { task_id: t, .. } if *t == task_id))
    }
}

/// Priority given to the control-flow queue by [`recommend_config`].
pub const CONTROL_FLOW_QP: i32 = 2;
/// Priority given to every data-flow queue by [`recommend_config`].
pub const DATA_FLOW_QP: i32 = 1;

/// One control-flow queue (id 0) followed by one data-flow queue per
/// (task, program point), each sized to keep one whole checkpoint.
pub fn recommend_config(tasks: &[TaskMeta], pool: &PoolConfig) -> Result<(Vec<QueueConfig>, RoleMap), ConfigError> {
    let wanted = 1 + tasks.iter().map(|t| t.checkpoint_bytes.len()).sum::<usize>();
    if pool.queue_count != wanted {
        return Err(ConfigError::QueueCountMismatch {
            expected: wanted,
            got: pool.queue_count,
        });
    }
    pool.validate()?;
    let mut queues = vec![QueueConfig {
        queue_id: 0,
        mtl: 0,
        msl: 0,
        qp: CONTROL_FLOW_QP,
    }];
    let mut roles = vec![QueueRole::ControlFlow];
    for task in tasks {
        if task.checkpoint_bytes.is_empty() || task.checkpoint_bytes.contains(&0) {
            return Err(ConfigError::InvalidTask(task.task_id));
        }
        for (pp, &bytes) in task.checkpoint_bytes.iter().enumerate() {
            let needed = pool.records_for(bytes);
            if needed > pool.max_records_per_entry as u64 {
                return Err(ConfigError::CheckpointTooLarge {
                    needed,
                    max: pool.max_records_per_entry,
                });
            }
            let queue_id = queues.len();
            if needed as usize > pool.pool_records {
                return Err(ConfigError::MslTooLarge {
                    queue_id,
                    msl: needed as usize,
                    pool_records: pool.pool_records,
                });
            }
            queues.push(QueueConfig {
                queue_id,
                mtl: 0,
                msl: needed as usize,
                qp: DATA_FLOW_QP,
            });
            roles.push(QueueRole::DataFlow {
                task_id: task.task_id,
                program_point: pp as u32,
            });
        }
    }
    Ok((queues, RoleMap { roles }))
}

/// Waste of one candidate record size over a histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSizeWaste {
    pub record_bytes: u64,
    pub waste_bytes: u64,
}

/// Picks the record size that loses the fewest padding bytes over
/// `(entry bytes, frequency)` pairs; ties go to the smaller size.
pub fn suggest_record_size(
    histogram: &[(u64, u64)],
    candidates: &[u64],
) -> Result<(u64, Vec<RecordSizeWaste>), RecordSizeError> {
    if histogram.is_empty() {
        return Err(RecordSizeError::EmptyHistogram);
    }
    if candidates.is_empty() {
        return Err(RecordSizeError::NoCandidates);
    }
    if candidates.contains(&0) {
        return Err(RecordSizeError::ZeroCandidate);
    }
    let table: Vec<RecordSizeWaste> = candidates
        .iter()
        .map(|&r| RecordSizeWaste {
            record_bytes: r,
            waste_bytes: histogram
                .iter()
                .map(|&(size, freq)| freq * (size.div_ceil(r).max(1) * r - size))
                .sum(),
        })
        .collect();
    let best = table
        .iter()
        .min_by_key(|w| (w.waste_bytes, w.record_bytes))
        .expect("non-empty")
        .record_bytes;
    Ok((best, table))
}
