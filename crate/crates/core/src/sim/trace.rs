use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::TaskMeta;
use crate::types::{EntryKind, Ticks};

/// Payload size logged for every context switch.
pub const CONTEXT_SWITCH_BYTES: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("task {0}: period must be at least 1")]
    ZeroPeriod(u32),
    #[error("task {0}: min_interarrival must be at least 1")]
    ZeroInterarrival(u32),
    #[error("task {task}: arrival_prob_permille {value} exceeds 1000")]
    ProbabilityOutOfRange { task: u32, value: u32 },
    #[error("task {0}: program_points offsets must be strictly increasing")]
    OffsetsNotIncreasing(u32),
    #[error("task {0}: program_points must not be empty")]
    NoProgramPoints(u32),
    #[error("task {0}: checkpoint_bytes must be positive")]
    ZeroCheckpoint(u32),
    #[error("task id {0} appears twice")]
    DuplicateTask(u32),
    #[error("duration must be at least 1")]
    ZeroDuration,
    #[error("crash_samples must be at least 1")]
    ZeroCrashSamples,
}

/// How a task's jobs are released.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Activation {
    Periodic {
        period: Ticks,
        offset: Ticks,
    },
    /// After `min_interarrival` ticks, each tick releases a job with
    /// probability `arrival_prob_permille / 1000`.
    Sporadic {
        min_interarrival: Ticks,
        arrival_prob_permille: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramPointSpec {
    /// Ticks after job start.
    pub offset: Ticks,
    pub checkpoint_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub offset: Ticks,
    pub payload_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task_id: u32,
    pub activation: Activation,
    pub program_points: Vec<ProgramPointSpec>,
    #[serde(default)]
    pub inputs_per_job: Vec<InputSpec>,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let id = self.task_id;
        match self.activation {
            Activation::Periodic { period: 0, .. } => return Err(SpecError::ZeroPeriod(id)),
            Activation::Sporadic {
                min_interarrival: 0, ..
            } => return Err(SpecError::ZeroInterarrival(id)),
            Activation::Sporadic {
                arrival_prob_permille: p,
                ..
            } if p > 1000 => return Err(SpecError::ProbabilityOutOfRange { task: id, value: p }),
            _ => {}
        }
        if self.program_points.is_empty() {
            return Err(SpecError::NoProgramPoints(id));
        }
        if self.program_points.iter().any(|p| p.checkpoint_bytes == 0) {
            return Err(SpecError::ZeroCheckpoint(id));
        }
        if self.program_points.windows(2).any(|w| w[0].offset >= w[1].offset) {
            return Err(SpecError::OffsetsNotIncreasing(id));
        }
        Ok(())
    }

    /// Offset of the job's closing context switch.
    pub fn job_length(&self) -> Ticks {
        let last = self
            .program_points
            .iter()
            .map(|p| p.offset)
            .chain(self.inputs_per_job.iter().map(|i| i.offset))
            .max()
            .unwrap_or(0);
        last + 1
    }

    pub fn meta(&self) -> TaskMeta {
        TaskMeta {
            task_id: self.task_id,
            checkpoint_bytes: self.program_points.iter().map(|p| p.checkpoint_bytes).collect(),
        }
    }
}

pub fn validate_tasks(tasks: &[TaskSpec]) -> Result<(), SpecError> {
    let mut seen = std::collections::BTreeSet::new();
    for t in tasks {
        t.validate()?;
        if !seen.insert(t.task_id) {
            return Err(SpecError::DuplicateTask(t.task_id));
        }
    }
    Ok(())
}

/// One monitored event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub at: Ticks,
    pub kind: EntryKind,
    pub task_id: u32,
    pub program_point: Option<u32>,
    pub job_index: u64,
    pub payload_bytes: u64,
}

impl TraceEvent {
    pub fn sort_key(&self) -> (Ticks, u32, u8, u64, Option<u32>) {
        (
            self.at,
            self.task_id,
            self.kind.rank(),
            self.job_index,
            self.program_point,
        )
    }
}

/// The splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

fn releases(task: &TaskSpec, duration: Ticks, rng: &mut SplitMix64) -> Vec<Ticks> {
    match task.activation {
        Activation::Periodic { period, offset } => (0..)
            .map(|k| offset + k * period)
            .take_while(|&r| r < duration)
            .collect(),
        Activation::Sporadic {
            min_interarrival,
            arrival_prob_permille,
        } => {
            let mut out = Vec::new();
            let mut last: Option<Ticks> = None;
            for t in 0..duration {
                if last.is_some_and(|l| t < l + min_interarrival) {
                    continue;
                }
                if rng.next_u64() % 1000 < arrival_prob_permille as u64 {
                    out.push(t);
                    last = Some(t);
                }
            }
            out
        }
    }
}

/// Events of all jobs released in `[0, duration)`, truncated to events
/// before `duration`, sorted by (tick, task, kind rank, job, program point).
pub fn generate_trace(tasks: &[TaskSpec], duration: Ticks, seed: u64) -> Result<Vec<TraceEvent>, SpecError> {
    validate_tasks(tasks)?;
    if duration == 0 {
        return Err(SpecError::ZeroDuration);
    }
    let mut rng = SplitMix64::new(seed);
    let mut events = Vec::new();
    for task in tasks {
        let end = task.job_length();
        for (job, start) in releases(task, duration, &mut rng).into_iter().enumerate() {
            let job = job as u64;
            let ev = |at, kind, program_point, payload_bytes| TraceEvent {
                at,
                kind,
                task_id: task.task_id,
                program_point,
                job_index: job,
                payload_bytes,
            };
            events.push(ev(start, EntryKind::ContextSwitch, None, CONTEXT_SWITCH_BYTES));
            for (k, pp) in task.program_points.iter().enumerate() {
                events.push(ev(
                    start + pp.offset,
                    EntryKind::Checkpoint,
                    Some(k as u32),
                    pp.checkpoint_bytes,
                ));
            }
            for input in &task.inputs_per_job {
                events.push(ev(start + input.offset, EntryKind::Input, None, input.payload_bytes));
            }
            events.push(ev(start + end, EntryKind::ContextSwitch, None, CONTEXT_SWITCH_BYTES));
        }
    }
    events.retain(|e| e.at < duration);
    events.sort_by_key(TraceEvent::sort_key);
    Ok(events)
}
