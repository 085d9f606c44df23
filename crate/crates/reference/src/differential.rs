//! Lock-step comparison of the real schedulers against the models.

use rtrlog_core::{
    usable_starting_points, AnalyzeError, Ecetes, EvictionScheduler, Gfifo, Lfifo, LfifoConfig, LogSnapshot,
    SchedulerError,
};

use crate::analyzer::{naive_availability, NaiveInstance};
use crate::invariants::{InvariantMonitor, Policy};
use crate::schedulers::{outcome_key, RefEcetes, RefGfifo, RefLfifo, RefScheduler};
use crate::workload::{RandomScenario, RandomSnapshot};

/// Which checks run after each insert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checks {
    /// Compare full snapshots every this many inserts (0 = only at the end).
    pub snapshot_every: usize,
    /// Run the invariant monitor on every step.
    pub invariants: bool,
}

pub struct Systems {
    pub ecetes: (Ecetes, RefEcetes),
    pub gfifo: (Gfifo, RefGfifo),
    pub lfifo: (Lfifo, RefLfifo),
}

pub fn build(s: &RandomScenario) -> Systems {
    let caps = LfifoConfig {
        capacities: s.caps.clone(),
    };
    Systems {
        ecetes: (
            Ecetes::new(s.pool, &s.queues).expect("generated config is valid"),
            RefEcetes::new(s.pool, &s.queues),
        ),
        gfifo: (
            Gfifo::new(s.pool).expect("generated config is valid"),
            RefGfifo::new(s.pool),
        ),
        lfifo: (
            Lfifo::new(s.pool, caps).expect("generated caps are valid"),
            RefLfifo::new(s.pool, &s.caps),
        ),
    }
}

fn same_snapshot(a: &LogSnapshot, b: &LogSnapshot) -> bool {
    a.queues == b.queues && a.drop_count == b.drop_count
}

fn lockstep<S: EvictionScheduler, R: RefScheduler>(
    s: &RandomScenario,
    real: &mut S,
    model: &mut R,
    mut monitor: Option<InvariantMonitor>,
    snapshot_every: usize,
) -> Result<usize, String> {
    let name = real.name();
    let mut accepted = 0;
    for (i, e) in s.entries.iter().enumerate() {
        let got = real.insert_entry(e);
        let want = model.insert(e);
        match (got, want) {
            (Ok(o), Ok(w)) => {
                if outcome_key(&o) != w {
                    return Err(format!("{name}: insert {i} gave {:?}, model {:?}", outcome_key(&o), w));
                }
                if o.is_accepted() {
                    accepted += 1;
                }
                if let Some(m) = monitor.as_mut() {
                    m.check(real, e, &o).map_err(|m| format!("{name}: insert {i}: {m}"))?;
                }
            }
            (Err(a), Err(b)) if a == b => {}
            (a, b) => return Err(format!("{name}: insert {i} gave {a:?}, model {b:?}")),
        }
        if real.free_records() != model.free_records() {
            return Err(format!("{name}: free records differ after insert {i}"));
        }
        let last = i + 1 == s.entries.len();
        if last || (snapshot_every > 0 && (i + 1) % snapshot_every == 0) {
            let now = e.timestamp;
            if !same_snapshot(&real.snapshot(now), &model.snapshot(now)) {
                return Err(format!("{name}: snapshots differ after insert {i}"));
            }
        }
    }
    Ok(accepted)
}

/// Runs all three schedulers against their models. Returns the number of
/// accepted inserts per scheduler.
pub fn check_scenario(s: &RandomScenario, checks: Checks) -> Result<[usize; 3], String> {
    let mut sys = build(s);
    let q = s.pool.queue_count;
    let mon = |p: Policy| checks.invariants.then(|| InvariantMonitor::new(q, p));
    let e = lockstep(
        s,
        &mut sys.ecetes.0,
        &mut sys.ecetes.1,
        mon(Policy::Ecetes(s.queues.clone())),
        checks.snapshot_every,
    )?;
    let g = lockstep(
        s,
        &mut sys.gfifo.0,
        &mut sys.gfifo.1,
        mon(Policy::Gfifo),
        checks.snapshot_every,
    )?;
    let l = lockstep(
        s,
        &mut sys.lfifo.0,
        &mut sys.lfifo.1,
        mon(Policy::Lfifo(s.caps.clone())),
        checks.snapshot_every,
    )?;
    Ok([e, g, l])
}

/// Error the models would report for an entry, if any. Used to keep
/// generated workloads free of caller errors.
pub fn caller_error(s: &RandomScenario) -> Option<SchedulerError> {
    let mut model = RefGfifo::new(s.pool);
    s.entries.iter().find_map(|e| model.insert(e).err())
}

/// Compares the analyzer with the naive enumerator on one snapshot.
pub fn check_analyzer(r: &RandomSnapshot) -> Result<(), String> {
    let got = usable_starting_points(&r.snapshot, &r.tasks, r.cf_queue);
    let want = naive_availability(&r.snapshot, &r.tasks, r.cf_queue);
    let (got, want) = match (got, want) {
        (Err(AnalyzeError::MissingControlFlowQueue(_)), None) => return Ok(()),
        (Ok(g), Some(w)) => (g, w),
        (g, w) => return Err(format!("analyzer {g:?}, naive {w:?}")),
    };
    if got.tasks.len() != want.len() {
        return Err("task count differs".into());
    }
    for (g, w) in got.tasks.iter().zip(&want) {
        let gi: Vec<NaiveInstance> = g
            .instances
            .iter()
            .map(|i| NaiveInstance {
                program_point: i.program_point,
                job_index: i.job_index,
                seq: i.checkpoint_seq,
                ts: i.checkpoint_ts,
                usable: i.usable,
            })
            .collect();
        if g.task_id != w.task_id || gi != w.instances || g.guaranteed_start_ts != w.guaranteed_start_ts {
            return Err(format!("task {}: analyzer {g:?}, naive {w:?}", w.task_id));
        }
        let window = w.guaranteed_start_ts.map(|ts| r.snapshot.taken_at - ts);
        if g.replay_window != window {
            return Err(format!(
                "task {}: replay window {:?} != {window:?}",
                w.task_id, g.replay_window
            ));
        }
    }
    Ok(())
}
