//! Seeded random scheduler workloads for differential tests.

use rtrlog_core::sim::SplitMix64;
use rtrlog_core::{
    EntryDescriptor, EntryKind, EntrySummary, LogSnapshot, PoolConfig, QueueConfig, QueueId, QueueSnapshot, TaskMeta,
    Ticks,
};

#[derive(Debug, Clone)]
pub struct RandomScenario {
    pub pool: PoolConfig,
    pub queues: Vec<QueueConfig>,
    /// LFIFO capacities; each at least 1, summing to at most the pool.
    pub caps: Vec<usize>,
    pub entries: Vec<EntryDescriptor>,
}

struct Rng(SplitMix64);

impl Rng {
    /// Uniform in `lo..=hi`.
    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.0.next_u64() % (hi - lo + 1)
    }

    fn chance(&mut self, percent: u64) -> bool {
        self.range(0, 99) < percent
    }
}

/// Q <= 5, pool <= 64 records, max entry <= 4 records, `inserts` entries
/// with non-decreasing timestamps.
pub fn random_scenario(seed: u64, inserts: usize) -> RandomScenario {
    let mut rng = Rng(SplitMix64::new(seed));
    let q = rng.range(1, 5) as usize;
    let lmax = rng.range(1, 4) as usize;
    let records = rng.range(lmax.max(q) as u64, 64) as usize;
    build(rng, q, lmax, records, inserts)
}

/// Random queue settings and entries over a fixed shape.
pub fn scenario_with(seed: u64, queues: usize, max_records: usize, records: usize, inserts: usize) -> RandomScenario {
    build(Rng(SplitMix64::new(seed)), queues, max_records, records, inserts)
}

fn build(mut rng: Rng, q: usize, lmax: usize, records: usize, inserts: usize) -> RandomScenario {
    let record_bytes = [4u64, 8, 16][rng.range(0, 2) as usize];
    let pool = PoolConfig {
        pool_records: records,
        record_payload_bytes: record_bytes,
        max_records_per_entry: lmax,
        queue_count: q,
    };
    let queues = (0..q)
        .map(|id| QueueConfig {
            queue_id: id,
            mtl: if rng.chance(50) { 0 } else { rng.range(1, 20) },
            msl: if rng.chance(40) {
                0
            } else {
                rng.range(1, 6.min(records as u64)) as usize
            },
            qp: rng.range(0, 2) as i32,
        })
        .collect();
    let mut caps = vec![1usize; q];
    let spare = records - q;
    let hand_out = if rng.chance(30) {
        rng.range(0, spare as u64) as usize
    } else {
        spare
    };
    for _ in 0..hand_out {
        caps[rng.range(0, q as u64 - 1) as usize] += 1;
    }

    let mut ts: Ticks = 0;
    let entries = (0..inserts)
        .map(|_| {
            ts += rng.range(0, 3);
            let target = rng.range(0, q as u64 - 1) as usize;
            let payload = if rng.chance(5) {
                rng.range(lmax as u64 * record_bytes + 1, (lmax as u64 + 2) * record_bytes)
            } else {
                rng.range(0, lmax as u64 * record_bytes)
            };
            let kind = EntryKind::ALL[rng.range(0, 4) as usize];
            let task = rng.range(0, 3) as u32;
            let job = rng.range(0, 50);
            match kind {
                EntryKind::Checkpoint => {
                    EntryDescriptor::checkpoint(target, ts, payload, task, rng.range(0, 2) as u32, job)
                }
                _ => EntryDescriptor::new(target, kind, ts, payload).with_task(task, job),
            }
        })
        .collect();
    RandomScenario {
        pool,
        queues,
        caps,
        entries,
    }
}

#[derive(Debug, Clone)]
pub struct RandomSnapshot {
    pub snapshot: LogSnapshot,
    pub tasks: Vec<TaskMeta>,
    pub cf_queue: QueueId,
}

/// A snapshot shaped like scheduler output: one stream of entries with
/// non-decreasing timestamps spread over the queues, then a random prefix
/// of each queue dropped. Checkpoints may name unknown tasks or program
/// points past the task's last one, (program point, job) pairs repeat, and
/// the control-flow queue id is sometimes one past the last queue.
pub fn random_snapshot(seed: u64) -> RandomSnapshot {
    let mut rng = Rng(SplitMix64::new(seed));
    let q = rng.range(1, 5) as usize;
    let task_count = rng.range(1, 3) as u32;
    let tasks: Vec<TaskMeta> = (0..task_count)
        .map(|task_id| TaskMeta {
            task_id,
            checkpoint_bytes: vec![16; rng.range(1, 3) as usize],
        })
        .collect();
    let mut queues: Vec<Vec<EntrySummary>> = vec![Vec::new(); q];
    let mut ts: Ticks = 0;
    for seq in 0..rng.range(0, 60) {
        ts += rng.range(0, 5);
        let kind = EntryKind::ALL[rng.range(0, 4) as usize];
        let mut e = EntrySummary {
            seq,
            kind,
            ts,
            size: rng.range(0, 32),
            task: Some(rng.range(0, task_count as u64) as u32),
            pp: None,
            job: Some(rng.range(0, 2)),
        };
        if kind == EntryKind::Checkpoint {
            e.pp = Some(rng.range(0, 3) as u32);
        } else if rng.chance(20) {
            e.task = None;
            e.job = None;
        }
        queues[rng.range(0, q as u64 - 1) as usize].push(e);
    }
    for entries in &mut queues {
        if rng.chance(60) {
            let cut = rng.range(0, entries.len() as u64) as usize;
            entries.drain(..cut);
        }
    }
    let cf_queue = rng.range(0, q as u64) as usize;
    RandomSnapshot {
        snapshot: LogSnapshot {
            taken_at: ts + rng.range(0, 10),
            queues: queues
                .into_iter()
                .enumerate()
                .map(|(id, entries)| QueueSnapshot { id, entries })
                .collect(),
            drop_count: rng.range(0, 3),
        },
        tasks,
        cf_queue,
    }
}
