use rtrlog_core::{EntryKind, LogSnapshot, QueueId, TaskMeta, Ticks};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveInstance {
    pub program_point: u32,
    pub job_index: u64,
    pub seq: u64,
    pub ts: Ticks,
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveTask {
    pub task_id: u32,
    /// Sorted by (program point, job, seq).
    pub instances: Vec<NaiveInstance>,
    pub guaranteed_start_ts: Option<Ticks>,
}

struct Found {
    pp: u32,
    job: u64,
    seq: u64,
    ts: Ticks,
}

/// Applies the three usability conditions by direct recursion over every
/// checkpoint in the snapshot. `None` when the control-flow queue is absent.
pub fn naive_availability(snap: &LogSnapshot, tasks: &[TaskMeta], cf_queue: QueueId) -> Option<Vec<NaiveTask>> {
    let cf = snap.queues.iter().find(|q| q.id == cf_queue)?;
    let horizon = cf.entries.iter().map(|e| e.ts).min();

    fn usable(all: &[Found], i: usize, horizon: Option<Ticks>) -> bool {
        let me = &all[i];
        let Some(h) = horizon else { return false };
        if me.ts < h {
            return false;
        }
        if me.pp == 0 {
            return true;
        }
        (0..all.len()).any(|j| all[j].pp == me.pp - 1 && all[j].job == me.job && usable(all, j, horizon))
    }

    let mut out = Vec::new();
    for t in tasks {
        let mut found = Vec::new();
        for q in &snap.queues {
            for e in &q.entries {
                if e.kind == EntryKind::Checkpoint && e.task == Some(t.task_id) {
                    found.push(Found {
                        pp: e.pp?,
                        job: e.job?,
                        seq: e.seq,
                        ts: e.ts,
                    });
                }
            }
        }
        let mut instances: Vec<NaiveInstance> = (0..found.len())
            .map(|i| NaiveInstance {
                program_point: found[i].pp,
                job_index: found[i].job,
                seq: found[i].seq,
                ts: found[i].ts,
                usable: usable(&found, i, horizon),
            })
            .collect();
        instances.sort_by_key(|i| (i.program_point, i.job_index, i.seq));
        let mut guaranteed = None;
        for i in &instances {
            if i.usable && guaranteed.is_none_or(|g| i.ts < g) {
                guaranteed = Some(i.ts);
            }
        }
        out.push(NaiveTask {
            task_id: t.task_id,
            instances,
            guaranteed_start_ts: guaranteed,
        });
    }
    Some(out)
}
