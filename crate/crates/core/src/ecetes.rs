//! Extended constant execution time eviction scheduler.
//!
//! Queues share one pool of fixed-size records. An insertion that needs `l`
//! records takes them from the free list; when the free list is short by `n`
//! records, every queue is inspected at the record that would become its
//! oldest survivor after giving up `n` records (rounded up to whole entries),
//! and the queue that suffers least gives them up.
//!
//! Every call runs the same fixed-trip-count loops whatever the pool
//! contents, so the step count of an insertion depends only on the queue
//! count and the maximum entry size. See [`Ecetes::step_budget`].

use std::cmp::Reverse;

use crate::error::{ConfigError, SchedulerError};
use crate::pool::{check_entry, SlotPool, Stamp, NIL};
use crate::scheduler::EvictionScheduler;
use crate::types::{
    EntryDescriptor, Eviction, Holder, InsertOutcome, InsertStatus, LogSnapshot, PoolConfig, QueueConfig, QueueId,
    QueueSnapshot, QueueStats, RecordSlot, Ticks,
};

/// What the inspection of one queue found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Candidate {
    queue: QueueId,
    qp: i32,
    /// Age of the survivor boundary; `None` when nothing would survive.
    boundary_age: Option<Ticks>,
}

impl Candidate {
    /// Smaller key = better victim.
    fn key(&self) -> (i32, Reverse<(bool, Ticks)>, QueueId) {
        let age = match self.boundary_age {
            None => (true, 0),
            Some(a) => (false, a),
        };
        (self.qp, Reverse(age), self.queue)
    }
}

#[derive(Debug, Clone)]
pub struct Ecetes {
    config: PoolConfig,
    queues: Vec<QueueConfig>,
    slots: SlotPool,
    next_seq: u64,
    drop_count: u64,
    last_ts: Option<Ticks>,
}

impl Ecetes {
    pub fn new(config: PoolConfig, queues: &[QueueConfig]) -> Result<Self, ConfigError> {
        config.validate()?;
        if queues.len() != config.queue_count {
            return Err(ConfigError::QueueCountMismatch {
                expected: config.queue_count,
                got: queues.len(),
            });
        }
        let mut by_id: Vec<Option<QueueConfig>> = vec![None; config.queue_count];
        for q in queues {
            match by_id.get_mut(q.queue_id) {
                Some(slot @ None) => *slot = Some(*q),
                _ => return Err(ConfigError::BadQueueId(q.queue_id)),
            }
            if q.msl > config.pool_records {
                return Err(ConfigError::MslTooLarge {
                    queue_id: q.queue_id,
                    msl: q.msl,
                    pool_records: config.pool_records,
                });
            }
        }
        let queues = by_id.into_iter().flatten().collect();
        let free = config.queue_count;
        Ok(Self {
            config,
            queues,
            slots: SlotPool::new(config.pool_records, config.queue_count + 1, free),
            next_seq: 0,
            drop_count: 0,
            last_ts: None,
        })
    }

    /// Steps consumed by every insertion for `queue_count` queues and entries
    /// of at most `max_records` records.
    pub fn step_budget(queue_count: usize, max_records: usize) -> u64 {
        let (q, l) = (queue_count as u64, max_records as u64);
        // entry + free check + inspection + choice + eviction + allocation + exit
        1 + 1 + q * (1 + 2 * l) + 1 + (2 * l - 1) + l + 1
    }

    pub fn queue_configs(&self) -> &[QueueConfig] {
        &self.queues
    }

    fn free_list(&self) -> usize {
        self.config.queue_count
    }

    fn window(&self) -> usize {
        2 * self.config.max_records_per_entry
    }

    /// Chooses the queue that gives up `n` records at time `now`, or `None`
    /// when every queue is protected by its MTL/MSL (or `n` is outside
    /// `1..=max_records_per_entry`).
    pub fn select_victim_queue(&self, n: usize, now: Ticks) -> Option<QueueId> {
        if n == 0 || n > self.config.max_records_per_entry {
            return None;
        }
        let mut steps = 0;
        self.select(n, now, &mut steps).map(|c| c.queue)
    }

    fn select(&self, n: usize, now: Ticks, steps: &mut u64) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for q in 0..self.queues.len() {
            *steps += 1;
            if let Some(c) = self.inspect(q, n, now, steps) {
                if best.is_none_or(|b| c.key() < b.key()) {
                    best = Some(c);
                }
            }
        }
        *steps += 1;
        best
    }

    /// Walks a fixed window from the old end of `queue`: the shortest run of
    /// whole entries covering `n` records, then the first surviving record.
    fn inspect(&self, queue: QueueId, n: usize, now: Ticks, steps: &mut u64) -> Option<Candidate> {
        let cfg = &self.queues[queue];
        let mut cursor = self.slots.lists[queue].head;
        let mut covered = 0usize;
        let mut run: Option<(usize, Ticks)> = None;
        let mut boundary_ts: Option<Ticks> = None;
        for _ in 0..self.window() {
            *steps += 1;
            if cursor == NIL {
                continue;
            }
            let slot = &self.slots.slots[cursor];
            let stamp = slot.stamp.as_ref().expect("queued record without entry");
            match run {
                None => {
                    covered += 1;
                    if stamp.is_last() && covered >= n {
                        run = Some((covered, stamp.ts));
                    }
                    cursor = slot.next;
                }
                Some(_) => {
                    boundary_ts = Some(stamp.ts);
                    cursor = NIL;
                }
            }
        }
        let (freed, youngest_ts) = run?;
        let length = self.slots.len(queue);
        if length - freed < cfg.msl || now.saturating_sub(youngest_ts) < cfg.mtl {
            return None;
        }
        Some(Candidate {
            queue,
            qp: cfg.qp,
            boundary_age: boundary_ts.map(|ts| now.saturating_sub(ts)),
        })
    }
}

impl EvictionScheduler for Ecetes {
    fn name(&self) -> &'static str {
        "ecetes"
    }

    fn pool(&self) -> &PoolConfig {
        &self.config
    }

    fn insert_entry(&mut self, entry: &EntryDescriptor) -> Result<InsertOutcome, SchedulerError> {
        check_entry(entry, self.config.queue_count, self.last_ts)?;
        self.last_ts = Some(entry.timestamp);
        let lmax = self.config.max_records_per_entry;
        let free_list = self.free_list();
        let now = entry.timestamp;

        let mut steps = 1;
        let records = self.config.records_for(entry.payload_bytes);
        let fits = records <= lmax as u64;
        let l = records.min(lmax as u64) as usize;

        steps += 1;
        let need = l.saturating_sub(self.slots.len(free_list));

        // Inspection always runs so that every call costs the same.
        let victim = self.select(need.max(1), now, &mut steps);

        let status = if !fits {
            InsertStatus::RejectedTooLarge
        } else if need == 0 || victim.is_some() {
            InsertStatus::Accepted
        } else {
            self.drop_count += 1;
            InsertStatus::RejectedNoEligibleVictim
        };
        let accepted = status == InsertStatus::Accepted;

        let mut evicted = Vec::new();
        let mut evicting = accepted && need > 0;
        let victim_queue = victim.map_or(NIL, |v| v.queue);
        let mut freed = 0usize;
        for _ in 0..(2 * lmax - 1) {
            steps += 1;
            if !evicting {
                continue;
            }
            let head = match self.slots.head_stamp(victim_queue).copied() {
                Some(h) if freed < need || !h.is_first() => h,
                _ => {
                    evicting = false;
                    continue;
                }
            };
            let slot = self.slots.pop_front(victim_queue).expect("non-empty victim");
            if head.is_first() {
                evicted.push(Eviction {
                    queue_id: victim_queue,
                    entry_seq: head.seq,
                });
            }
            self.slots.slots[slot].stamp = None;
            self.slots.push_back(free_list, slot);
            freed += 1;
        }

        let seq = self.next_seq;
        for i in 0..lmax {
            steps += 1;
            if !accepted || i >= l {
                continue;
            }
            let slot = self.slots.pop_front(free_list).expect("free record reserved");
            let mut stamp = Stamp::new(seq, entry, l);
            stamp.segment = i;
            self.slots.slots[slot].stamp = Some(stamp);
            self.slots.push_back(entry.target_queue, slot);
        }
        if accepted {
            self.next_seq += 1;
        }
        steps += 1;

        Ok(InsertOutcome {
            status,
            seq: accepted.then_some(seq),
            evicted,
            steps,
        })
    }

    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        LogSnapshot {
            taken_at: now,
            queues: (0..self.config.queue_count)
                .map(|q| QueueSnapshot {
                    id: q,
                    entries: self.slots.entries(q),
                })
                .collect(),
            drop_count: self.drop_count,
        }
    }

    fn queue_stats(&self, queue: QueueId) -> Result<QueueStats, SchedulerError> {
        if queue >= self.config.queue_count {
            return Err(SchedulerError::UnknownQueue(queue));
        }
        Ok(self.slots.stats(queue))
    }

    fn free_records(&self) -> usize {
        self.slots.len(self.free_list())
    }

    fn drop_count(&self) -> u64 {
        self.drop_count
    }

    fn record_slots(&self) -> Vec<RecordSlot> {
        let free = self.free_list();
        self.slots
            .record_slots(|l| if l == free { Holder::Free } else { Holder::Queue(l) })
    }

    fn audit(&self) -> Result<(), String> {
        let queues: Vec<usize> = (0..self.config.queue_count).collect();
        self.slots.audit(&queues)
    }
}
