//! FIFO baselines sharing the [`EvictionScheduler`] interface.
//!
//! [`Gfifo`] keeps one global FIFO over the whole pool and records the
//! target queue only as metadata. [`Lfifo`] gives every queue a private,
//! statically sized region and never evicts across queues.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, SchedulerError};
use crate::pool::{check_entry, SlotPool, Stamp};
use crate::scheduler::EvictionScheduler;
use crate::types::{
    EntryDescriptor, Eviction, Holder, InsertOutcome, InsertStatus, LogSnapshot, PoolConfig, QueueId, QueueSnapshot,
    QueueStats, RecordSlot, Ticks,
};

/// Evicts oldest whole entries from `from` onto `free` until `free` holds
/// `needed` records. Returns the evictions and the records moved.
fn evict_until(slots: &mut SlotPool, from: usize, free: usize, needed: usize, evicted: &mut Vec<Eviction>) -> u64 {
    let mut moved = 0;
    loop {
        let Some(head) = slots.head_stamp(from).copied() else {
            break;
        };
        if slots.len(free) >= needed && head.is_first() {
            break;
        }
        let slot = slots.pop_front(from).expect("head exists");
        if head.is_first() {
            evicted.push(Eviction {
                queue_id: head.target_queue,
                entry_seq: head.seq,
            });
        }
        slots.slots[slot].stamp = None;
        slots.push_back(free, slot);
        moved += 1;
    }
    moved
}

fn allocate(slots: &mut SlotPool, free: usize, list: usize, entry: &EntryDescriptor, seq: u64, l: usize) {
    for i in 0..l {
        let slot = slots.pop_front(free).expect("free records reserved");
        let mut stamp = Stamp::new(seq, entry, l);
        stamp.segment = i;
        slots.slots[slot].stamp = Some(stamp);
        slots.push_back(list, slot);
    }
}

const STORE: usize = 0;
const GLOBAL_FREE: usize = 1;

/// Global FIFO: one store for every entry, oldest evicted first.
#[derive(Debug, Clone)]
pub struct Gfifo {
    config: PoolConfig,
    slots: SlotPool,
    next_seq: u64,
    last_ts: Option<Ticks>,
}

impl Gfifo {
    pub fn new(config: PoolConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self {
            config,
            slots: SlotPool::new(config.pool_records, 2, GLOBAL_FREE),
            next_seq: 0,
            last_ts: None,
        })
    }

    fn stamps_for(&self, queue: QueueId) -> impl Iterator<Item = &Stamp> + '_ {
        self.slots
            .iter_list(STORE)
            .filter_map(|i| self.slots.slots[i].stamp.as_ref())
            .filter(move |s| s.target_queue == queue)
    }
}

impl EvictionScheduler for Gfifo {
    fn name(&self) -> &'static str {
        "gfifo"
    }

    fn pool(&self) -> &PoolConfig {
        &self.config
    }

    fn insert_entry(&mut self, entry: &EntryDescriptor) -> Result<InsertOutcome, SchedulerError> {
        check_entry(entry, self.config.queue_count, self.last_ts)?;
        self.last_ts = Some(entry.timestamp);
        let mut steps = 1;
        let l = self.config.records_for(entry.payload_bytes);
        if l > self.config.max_records_per_entry as u64 {
            return Ok(InsertOutcome {
                status: InsertStatus::RejectedTooLarge,
                seq: None,
                evicted: Vec::new(),
                steps: steps + 1,
            });
        }
        let l = l as usize;
        let mut evicted = Vec::new();
        steps += evict_until(&mut self.slots, STORE, GLOBAL_FREE, l, &mut evicted);
        let seq = self.next_seq;
        self.next_seq += 1;
        allocate(&mut self.slots, GLOBAL_FREE, STORE, entry, seq, l);
        steps += l as u64 + 1;
        Ok(InsertOutcome {
            status: InsertStatus::Accepted,
            seq: Some(seq),
            evicted,
            steps,
        })
    }

    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        let mut queues: Vec<QueueSnapshot> = (0..self.config.queue_count)
            .map(|id| QueueSnapshot {
                id,
                entries: Vec::new(),
            })
            .collect();
        for e in self.slots.iter_list(STORE) {
            let stamp = self.slots.slots[e].stamp.expect("stored record");
            if stamp.is_first() {
                queues[stamp.target_queue].entries.push(stamp.summary());
            }
        }
        LogSnapshot {
            taken_at: now,
            queues,
            drop_count: 0,
        }
    }

    fn queue_stats(&self, queue: QueueId) -> Result<QueueStats, SchedulerError> {
        if queue >= self.config.queue_count {
            return Err(SchedulerError::UnknownQueue(queue));
        }
        let mut stats = QueueStats {
            length: 0,
            entry_count: 0,
            oldest_ts: None,
            youngest_ts: None,
        };
        for s in self.stamps_for(queue) {
            stats.length += 1;
            if s.is_first() {
                stats.entry_count += 1;
                stats.oldest_ts.get_or_insert(s.ts);
                stats.youngest_ts = Some(s.ts);
            }
        }
        Ok(stats)
    }

    fn free_records(&self) -> usize {
        self.slots.len(GLOBAL_FREE)
    }

    fn drop_count(&self) -> u64 {
        0
    }

    fn record_slots(&self) -> Vec<RecordSlot> {
        let slots = &self.slots.slots;
        let mut view = self.slots.record_slots(|_| Holder::Free);
        for (v, s) in view.iter_mut().zip(slots) {
            if let Some(stamp) = s.stamp {
                v.holding_queue = Holder::Queue(stamp.target_queue);
            }
        }
        view
    }

    fn audit(&self) -> Result<(), String> {
        self.slots.audit(&[STORE])
    }
}

/// Static per-queue capacities for [`Lfifo`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfifoConfig {
    pub capacities: Vec<usize>,
}

impl LfifoConfig {
    pub fn validate(&self, pool: &PoolConfig) -> Result<(), ConfigError> {
        if self.capacities.len() != pool.queue_count {
            return Err(ConfigError::QueueCountMismatch {
                expected: pool.queue_count,
                got: self.capacities.len(),
            });
        }
        if let Some(q) = self.capacities.iter().position(|&c| c == 0) {
            return Err(ConfigError::ZeroCapacity(q));
        }
        let total: usize = self.capacities.iter().sum();
        if total > pool.pool_records {
            return Err(ConfigError::CapacityOverflow {
                total,
                pool_records: pool.pool_records,
            });
        }
        Ok(())
    }

    /// Splits the pool evenly; the first `pool % Q` queues get one extra record.
    pub fn equal_split(pool: &PoolConfig) -> Result<Self, ConfigError> {
        Self::proportional(pool, &vec![1; pool.queue_count])
    }

    /// One record per queue, the rest split in proportion to `weights` by
    /// largest remainder (ties to the lower queue id). All-zero weights fall
    /// back to an equal split.
    pub fn proportional(pool: &PoolConfig, weights: &[u64]) -> Result<Self, ConfigError> {
        let q = pool.queue_count;
        if weights.len() != q {
            return Err(ConfigError::QueueCountMismatch {
                expected: q,
                got: weights.len(),
            });
        }
        if pool.pool_records < q {
            return Err(ConfigError::CapacityOverflow {
                total: q,
                pool_records: pool.pool_records,
            });
        }
        let total_weight: u128 = weights.iter().map(|&w| w as u128).sum();
        let ones = vec![1u64; q];
        let (weights, total_weight) = if total_weight == 0 {
            (&ones[..], q as u128)
        } else {
            (weights, total_weight)
        };
        let spare = (pool.pool_records - q) as u128;
        let mut caps: Vec<usize> = Vec::with_capacity(q);
        let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(q);
        for (i, &w) in weights.iter().enumerate() {
            let scaled = spare * w as u128;
            caps.push(1 + (scaled / total_weight) as usize);
            remainders.push((scaled % total_weight, i));
        }
        let assigned: usize = caps.iter().sum::<usize>() - q;
        let mut left = spare as usize - assigned;
        remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, i) in &remainders {
            if left == 0 {
                break;
            }
            caps[i] += 1;
            left -= 1;
        }
        Ok(Self { capacities: caps })
    }
}

/// Local FIFO: each queue evicts only its own oldest entries.
#[derive(Debug, Clone)]
pub struct Lfifo {
    config: PoolConfig,
    caps: LfifoConfig,
    slots: SlotPool,
    next_seq: u64,
    last_ts: Option<Ticks>,
}

impl Lfifo {
    pub fn new(config: PoolConfig, caps: LfifoConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        caps.validate(&config)?;
        let q = config.queue_count;
        let unassigned = 2 * q;
        let mut slots = SlotPool::new(config.pool_records, 2 * q + 1, unassigned);
        for (queue, &cap) in caps.capacities.iter().enumerate() {
            for _ in 0..cap {
                let s = slots.pop_front(unassigned).expect("capacities validated");
                slots.push_back(q + queue, s);
            }
        }
        Ok(Self {
            config,
            caps,
            slots,
            next_seq: 0,
            last_ts: None,
        })
    }

    pub fn capacities(&self) -> &[usize] {
        &self.caps.capacities
    }

    fn private_free(&self, queue: QueueId) -> usize {
        self.config.queue_count + queue
    }
}

impl EvictionScheduler for Lfifo {
    fn name(&self) -> &'static str {
        "lfifo"
    }

    fn pool(&self) -> &PoolConfig {
        &self.config
    }

    fn insert_entry(&mut self, entry: &EntryDescriptor) -> Result<InsertOutcome, SchedulerError> {
        check_entry(entry, self.config.queue_count, self.last_ts)?;
        self.last_ts = Some(entry.timestamp);
        let q = entry.target_queue;
        let mut steps = 1;
        let l = self.config.records_for(entry.payload_bytes);
        let limit = self.caps.capacities[q].min(self.config.max_records_per_entry) as u64;
        if l > limit {
            return Ok(InsertOutcome {
                status: InsertStatus::RejectedTooLarge,
                seq: None,
                evicted: Vec::new(),
                steps: steps + 1,
            });
        }
        let l = l as usize;
        let free = self.private_free(q);
        let mut evicted = Vec::new();
        steps += evict_until(&mut self.slots, q, free, l, &mut evicted);
        let seq = self.next_seq;
        self.next_seq += 1;
        allocate(&mut self.slots, free, q, entry, seq, l);
        steps += l as u64 + 1;
        Ok(InsertOutcome {
            status: InsertStatus::Accepted,
            seq: Some(seq),
            evicted,
            steps,
        })
    }

    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        LogSnapshot {
            taken_at: now,
            queues: (0..self.config.queue_count)
                .map(|id| QueueSnapshot {
                    id,
                    entries: self.slots.entries(id),
                })
                .collect(),
            drop_count: 0,
        }
    }

    fn queue_stats(&self, queue: QueueId) -> Result<QueueStats, SchedulerError> {
        if queue >= self.config.queue_count {
            return Err(SchedulerError::UnknownQueue(queue));
        }
        Ok(self.slots.stats(queue))
    }

    fn free_records(&self) -> usize {
        let q = self.config.queue_count;
        (q..=2 * q).map(|l| self.slots.len(l)).sum()
    }

    fn drop_count(&self) -> u64 {
        0
    }

    fn record_slots(&self) -> Vec<RecordSlot> {
        let q = self.config.queue_count;
        self.slots
            .record_slots(|l| if l < q { Holder::Queue(l) } else { Holder::Free })
    }

    fn audit(&self) -> Result<(), String> {
        let q = self.config.queue_count;
        let queues: Vec<usize> = (0..q).collect();
        self.slots.audit(&queues)?;
        for (queue, &cap) in self.caps.capacities.iter().enumerate() {
            let held = self.slots.len(queue) + self.slots.len(q + queue);
            if held != cap {
                return Err(format!("queue {queue} region holds {held} records, capacity {cap}"));
            }
        }
        Ok(())
    }
}
