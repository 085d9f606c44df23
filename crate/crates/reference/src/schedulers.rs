use std::collections::VecDeque;

use rtrlog_core::{
    EntryDescriptor, EntryKind, EntrySummary, Eviction, InsertOutcome, InsertStatus, LogSnapshot, PoolConfig,
    QueueConfig, QueueSnapshot, SchedulerError, Ticks,
};

/// The part of an outcome a model must reproduce exactly.
pub type OutcomeKey = (InsertStatus, Option<u64>, Vec<Eviction>);

pub fn outcome_key(o: &InsertOutcome) -> OutcomeKey {
    (o.status, o.seq, o.evicted.clone())
}

#[derive(Debug, Clone)]
struct Entry {
    seq: u64,
    records: usize,
    queue: usize,
    desc: EntryDescriptor,
}

impl Entry {
    fn summary(&self) -> EntrySummary {
        EntrySummary {
            seq: self.seq,
            kind: self.desc.kind,
            ts: self.desc.timestamp,
            size: self.desc.payload_bytes,
            task: self.desc.task_id,
            pp: self.desc.program_point,
            job: self.desc.job_index,
        }
    }
}

fn records(pool: &PoolConfig, bytes: u64) -> usize {
    let r = pool.record_payload_bytes;
    let mut n = bytes / r;
    if bytes % r != 0 {
        n += 1;
    }
    if n == 0 {
        n = 1;
    }
    n as usize
}

#[derive(Debug, Clone, Default)]
struct Front {
    last_ts: Option<Ticks>,
    next_seq: u64,
}

impl Front {
    fn check(&mut self, e: &EntryDescriptor, queues: usize) -> Result<(), SchedulerError> {
        if e.target_queue >= queues {
            return Err(SchedulerError::UnknownQueue(e.target_queue));
        }
        if let Some(last) = self.last_ts {
            if e.timestamp < last {
                return Err(SchedulerError::TimestampRegression { last, got: e.timestamp });
            }
        }
        if e.kind == EntryKind::Checkpoint && (e.task_id.is_none() || e.program_point.is_none()) {
            return Err(SchedulerError::IncompleteCheckpoint);
        }
        self.last_ts = Some(e.timestamp);
        Ok(())
    }

    fn take_seq(&mut self) -> u64 {
        self.next_seq += 1;
        self.next_seq - 1
    }
}

fn rejected(status: InsertStatus) -> OutcomeKey {
    (status, None, Vec::new())
}

pub trait RefScheduler {
    fn insert(&mut self, e: &EntryDescriptor) -> Result<OutcomeKey, SchedulerError>;
    fn snapshot(&self, now: Ticks) -> LogSnapshot;
    fn free_records(&self) -> usize;
}

fn snapshot_of(queues: &[VecDeque<Entry>], now: Ticks, drop_count: u64) -> LogSnapshot {
    LogSnapshot {
        taken_at: now,
        queues: queues
            .iter()
            .enumerate()
            .map(|(id, q)| QueueSnapshot {
                id,
                entries: q.iter().map(Entry::summary).collect(),
            })
            .collect(),
        drop_count,
    }
}

/// List-of-lists model of the multi-queue scheduler.
#[derive(Debug, Clone)]
pub struct RefEcetes {
    pool: PoolConfig,
    cfg: Vec<QueueConfig>,
    queues: Vec<VecDeque<Entry>>,
    free: usize,
    drops: u64,
    front: Front,
}

impl RefEcetes {
    pub fn new(pool: PoolConfig, cfg: &[QueueConfig]) -> Self {
        let mut sorted = cfg.to_vec();
        sorted.sort_by_key(|q| q.queue_id);
        Self {
            pool,
            cfg: sorted,
            queues: vec![VecDeque::new(); pool.queue_count],
            free: pool.pool_records,
            drops: 0,
            front: Front::default(),
        }
    }

    fn len(&self, q: usize) -> usize {
        self.queues[q].iter().map(|e| e.records).sum()
    }

    /// Victim for `n` records at `now`, by brute force over every queue.
    pub fn victim(&self, n: usize, now: Ticks) -> Option<usize> {
        // (queue, qp, age of first survivor or None for "nothing survives")
        let mut eligible: Vec<(usize, i32, Option<Ticks>)> = Vec::new();
        for (q, entries) in self.queues.iter().enumerate() {
            let mut freed = 0;
            let mut taken = 0;
            while freed < n && taken < entries.len() {
                freed += entries[taken].records;
                taken += 1;
            }
            if freed < n {
                continue;
            }
            let youngest = entries[taken - 1].desc.timestamp;
            if self.len(q) - freed < self.cfg[q].msl {
                continue;
            }
            if now - youngest < self.cfg[q].mtl {
                continue;
            }
            let age = entries.get(taken).map(|e| now - e.desc.timestamp);
            eligible.push((q, self.cfg[q].qp, age));
        }
        let mut best: Option<(usize, i32, Option<Ticks>)> = None;
        for c in eligible {
            let better = match best {
                None => true,
                Some(b) => {
                    if c.1 != b.1 {
                        c.1 < b.1
                    } else if c.2 != b.2 {
                        match (c.2, b.2) {
                            (None, _) => true,
                            (_, None) => false,
                            (Some(x), Some(y)) => x > y,
                        }
                    } else {
                        c.0 < b.0
                    }
                }
            };
            if better {
                best = Some(c);
            }
        }
        best.map(|b| b.0)
    }
}

impl RefScheduler for RefEcetes {
    fn insert(&mut self, e: &EntryDescriptor) -> Result<OutcomeKey, SchedulerError> {
        self.front.check(e, self.pool.queue_count)?;
        let l = records(&self.pool, e.payload_bytes);
        if l > self.pool.max_records_per_entry {
            return Ok(rejected(InsertStatus::RejectedTooLarge));
        }
        let mut evicted = Vec::new();
        if self.free < l {
            let n = l - self.free;
            let Some(v) = self.victim(n, e.timestamp) else {
                self.drops += 1;
                return Ok(rejected(InsertStatus::RejectedNoEligibleVictim));
            };
            let mut freed = 0;
            while freed < n {
                let old = self.queues[v].pop_front().unwrap();
                freed += old.records;
                evicted.push(Eviction {
                    queue_id: v,
                    entry_seq: old.seq,
                });
            }
            self.free += freed;
        }
        let seq = self.front.take_seq();
        self.free -= l;
        self.queues[e.target_queue].push_back(Entry {
            seq,
            records: l,
            queue: e.target_queue,
            desc: *e,
        });
        Ok((InsertStatus::Accepted, Some(seq), evicted))
    }

    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        snapshot_of(&self.queues, now, self.drops)
    }

    fn free_records(&self) -> usize {
        self.free
    }
}

/// One global deque.
#[derive(Debug, Clone)]
pub struct RefGfifo {
    pool: PoolConfig,
    store: VecDeque<Entry>,
    free: usize,
    front: Front,
}

impl RefGfifo {
    pub fn new(pool: PoolConfig) -> Self {
        Self {
            pool,
            store: VecDeque::new(),
            free: pool.pool_records,
            front: Front::default(),
        }
    }
}

impl RefScheduler for RefGfifo {
    fn insert(&mut self, e: &EntryDescriptor) -> Result<OutcomeKey, SchedulerError> {
        self.front.check(e, self.pool.queue_count)?;
        let l = records(&self.pool, e.payload_bytes);
        if l > self.pool.max_records_per_entry {
            return Ok(rejected(InsertStatus::RejectedTooLarge));
        }
        let mut evicted = Vec::new();
        while self.free < l {
            let old = self.store.pop_front().unwrap();
            self.free += old.records;
            evicted.push(Eviction {
                queue_id: old.queue,
                entry_seq: old.seq,
            });
        }
        let seq = self.front.take_seq();
        self.free -= l;
        self.store.push_back(Entry {
            seq,
            records: l,
            queue: e.target_queue,
            desc: *e,
        });
        Ok((InsertStatus::Accepted, Some(seq), evicted))
    }

    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        let mut queues = vec![VecDeque::new(); self.pool.queue_count];
        for e in &self.store {
            queues[e.queue].push_back(e.clone());
        }
        snapshot_of(&queues, now, 0)
    }

    fn free_records(&self) -> usize {
        self.free
    }
}

/// One deque per queue with a fixed record budget.
#[derive(Debug, Clone)]
pub struct RefLfifo {
    pool: PoolConfig,
    caps: Vec<usize>,
    queues: Vec<VecDeque<Entry>>,
    front: Front,
}

impl RefLfifo {
    pub fn new(pool: PoolConfig, caps: &[usize]) -> Self {
        Self {
            pool,
            caps: caps.to_vec(),
            queues: vec![VecDeque::new(); pool.queue_count],
            front: Front::default(),
        }
    }

    fn used(&self, q: usize) -> usize {
        self.queues[q].iter().map(|e| e.records).sum()
    }
}

impl RefScheduler for RefLfifo {
    fn insert(&mut self, e: &EntryDescriptor) -> Result<OutcomeKey, SchedulerError> {
        self.front.check(e, self.pool.queue_count)?;
        let q = e.target_queue;
        let l = records(&self.pool, e.payload_bytes);
        if l > self.pool.max_records_per_entry || l > self.caps[q] {
            return Ok(rejected(InsertStatus::RejectedTooLarge));
        }
        let mut evicted = Vec::new();
        while self.caps[q] - self.used(q) < l {
            let old = self.queues[q].pop_front().unwrap();
            evicted.push(Eviction {
                queue_id: q,
                entry_seq: old.seq,
            });
        }
        let seq = self.front.take_seq();
        self.queues[q].push_back(Entry {
            seq,
            records: l,
            queue: q,
            desc: *e,
        });
        Ok((InsertStatus::Accepted, Some(seq), evicted))
    }

    fn snapshot(&self, now: Ticks) -> LogSnapshot {
        snapshot_of(&self.queues, now, 0)
    }

    fn free_records(&self) -> usize {
        self.pool.pool_records - (0..self.queues.len()).map(|q| self.used(q)).sum::<usize>()
    }
}
