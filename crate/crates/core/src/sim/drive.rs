use thiserror::Error;

use super::trace::TraceEvent;
use crate::analyzer::RoleMap;
use crate::error::SchedulerError;
use crate::scheduler::EvictionScheduler;
use crate::types::{EntryDescriptor, EntryKind, Flow, InsertOutcome, QueueId, Ticks};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DriveError {
    #[error("no queue is mapped for {kind:?} of task {task_id} (program point {program_point:?}) at t={at}")]
    Routing {
        at: Ticks,
        kind: EntryKind,
        task_id: u32,
        program_point: Option<u32>,
    },
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
}

/// Queue an event is logged into: control flow to the control-flow queue,
/// checkpoints to their (task, program point) queue, inputs to the queue of
/// the task's last program point.
pub fn route(event: &TraceEvent, roles: &RoleMap) -> Result<QueueId, DriveError> {
    let queue = match (event.kind.flow(), event.kind) {
        (Flow::ControlFlow, _) => roles.control_flow_queue(),
        (_, EntryKind::Checkpoint) => event
            .program_point
            .and_then(|pp| roles.checkpoint_queue(event.task_id, pp)),
        _ => roles.input_queue(event.task_id),
    };
    queue.ok_or(DriveError::Routing {
        at: event.at,
        kind: event.kind,
        task_id: event.task_id,
        program_point: event.program_point,
    })
}

pub fn entry_for(event: &TraceEvent, queue: QueueId) -> EntryDescriptor {
    EntryDescriptor {
        target_queue: queue,
        kind: event.kind,
        timestamp: event.at,
        payload_bytes: event.payload_bytes,
        task_id: Some(event.task_id),
        program_point: event.program_point,
        job_index: Some(event.job_index),
    }
}

/// Per-event outcomes of one run, in trace order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunLog {
    pub outcomes: Vec<InsertOutcome>,
}

impl RunLog {
    pub fn max_steps(&self) -> u64 {
        self.outcomes.iter().map(|o| o.steps).max().unwrap_or(0)
    }

    pub fn accepted(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_accepted()).count()
    }
}

/// Routes every event first, then feeds the trace to `scheduler` in order.
/// A routing failure leaves the scheduler untouched.
pub fn drive<S: EvictionScheduler + ?Sized>(
    trace: &[TraceEvent],
    scheduler: &mut S,
    roles: &RoleMap,
) -> Result<RunLog, DriveError> {
    let entries = trace
        .iter()
        .map(|e| route(e, roles).map(|q| entry_for(e, q)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut log = RunLog {
        outcomes: Vec::with_capacity(entries.len()),
    };
    for entry in &entries {
        log.outcomes.push(scheduler.insert_entry(entry)?);
    }
    Ok(log)
}
