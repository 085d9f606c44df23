//! Per-step structural checks usable with any scheduler.

use std::collections::HashMap;

use rtrlog_core::{EntryDescriptor, EvictionScheduler, Holder, InsertOutcome, LogSnapshot, QueueConfig, Ticks};

/// Extra policy facts a monitor can check.
#[derive(Debug, Clone)]
pub enum Policy {
    /// MTL/MSL per queue.
    Ecetes(Vec<QueueConfig>),
    /// Whole store is one FIFO.
    Gfifo,
    /// Per-queue capacity; insertions never touch other queues.
    Lfifo(Vec<usize>),
}

pub struct InvariantMonitor {
    policy: Policy,
    accepted: Vec<Vec<u64>>,
    all_accepted: Vec<u64>,
    info: HashMap<u64, (usize, Ticks)>,
    previous: Option<LogSnapshot>,
}

impl InvariantMonitor {
    pub fn new(queue_count: usize, mut policy: Policy) -> Self {
        if let Policy::Ecetes(q) = &mut policy {
            q.sort_by_key(|c| c.queue_id);
        }
        Self {
            policy,
            accepted: vec![Vec::new(); queue_count],
            all_accepted: Vec::new(),
            info: HashMap::new(),
            previous: None,
        }
    }

    /// Call after every `insert_entry` with its input and result.
    pub fn check<S: EvictionScheduler + ?Sized>(
        &mut self,
        sched: &S,
        entry: &EntryDescriptor,
        outcome: &InsertOutcome,
    ) -> Result<(), String> {
        let now = entry.timestamp;
        if !outcome.is_accepted() && !outcome.evicted.is_empty() {
            return Err("rejected insert reported evictions".into());
        }
        if let Some(seq) = outcome.seq {
            self.accepted[entry.target_queue].push(seq);
            self.all_accepted.push(seq);
            let l = sched.pool().records_for(entry.payload_bytes) as usize;
            self.info.insert(seq, (l, now));
        }
        sched.audit()?;

        let pool = sched.pool().pool_records;
        let q = sched.pool().queue_count;
        let lengths: Vec<usize> = (0..q)
            .map(|i| sched.queue_stats(i).map(|s| s.length))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let held: usize = lengths.iter().sum();
        if sched.free_records() + held != pool {
            return Err(format!(
                "conservation: free {} + held {held} != {pool}",
                sched.free_records()
            ));
        }

        self.check_atomicity(sched)?;

        let snap = sched.snapshot(now);
        for (qi, qs) in snap.queues.iter().enumerate() {
            let seqs: Vec<u64> = qs.entries.iter().map(|e| e.seq).collect();
            if !self.accepted[qi].ends_with(&seqs) {
                return Err(format!("queue {qi} is not a suffix of its accepted entries"));
            }
            if qs.entries.windows(2).any(|w| w[0].ts > w[1].ts) {
                return Err(format!("queue {qi} timestamps decrease"));
            }
        }

        match &self.policy {
            Policy::Ecetes(cfg) => {
                for ev in &outcome.evicted {
                    let c = &cfg[ev.queue_id];
                    if lengths[ev.queue_id] < c.msl {
                        return Err(format!("msl: queue {} left with {}", ev.queue_id, lengths[ev.queue_id]));
                    }
                    let (_, ts) = self.info[&ev.entry_seq];
                    if now - ts < c.mtl {
                        return Err(format!("mtl: entry {} evicted at age {}", ev.entry_seq, now - ts));
                    }
                }
            }
            Policy::Gfifo => {
                let mut stored: Vec<u64> = snap.entries().map(|(_, e)| e.seq).collect();
                stored.sort_unstable();
                if !self.all_accepted.ends_with(&stored) {
                    return Err("store is not a suffix of all accepted entries".into());
                }
            }
            Policy::Lfifo(caps) => {
                for (qi, &len) in lengths.iter().enumerate() {
                    if len > caps[qi] {
                        return Err(format!("queue {qi} holds {len} > cap {}", caps[qi]));
                    }
                }
                if let Some(prev) = &self.previous {
                    for (a, b) in prev.queues.iter().zip(&snap.queues) {
                        if a.id != entry.target_queue && a.entries != b.entries {
                            return Err(format!("insert into {} changed queue {}", entry.target_queue, a.id));
                        }
                    }
                }
            }
        }
        self.previous = Some(snap);
        Ok(())
    }

    fn check_atomicity<S: EvictionScheduler + ?Sized>(&self, sched: &S) -> Result<(), String> {
        let slots = sched.record_slots();
        let mut by_seq: HashMap<u64, Vec<usize>> = HashMap::new();
        for s in &slots {
            match (s.holding_queue, s.entry_seq) {
                (Holder::Free, None) | (Holder::Queue(_), Some(_)) => {}
                _ => return Err(format!("slot {} occupancy disagrees with holder", s.slot_index)),
            }
            if let Some(seq) = s.entry_seq {
                by_seq.entry(seq).or_default().push(s.slot_index);
            }
        }
        for (seq, members) in by_seq {
            let (l, _) = self.info[&seq];
            if members.len() != l {
                return Err(format!("entry {seq} holds {} of {l} records", members.len()));
            }
            let first = members
                .iter()
                .copied()
                .find(|&i| slots[i].segment_index == 0)
                .ok_or_else(|| format!("entry {seq} lost its first record"))?;
            let mut cur = first;
            for seg in 1..l {
                let next = slots[cur]
                    .next
                    .ok_or_else(|| format!("entry {seq} breaks after segment {}", seg - 1))?;
                let n = &slots[next];
                if n.entry_seq != Some(seq) || n.segment_index != seg || n.holding_queue != slots[first].holding_queue {
                    return Err(format!("entry {seq} is not contiguous"));
                }
                cur = next;
            }
        }
        Ok(())
    }
}
