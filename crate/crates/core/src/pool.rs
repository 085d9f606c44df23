//! Fixed array of records threaded into doubly linked lists.
//!
//! Every record belongs to exactly one list at all times. Lists are
//! identified by index; schedulers decide which lists are queues and which
//! hold free records. All list operations are O(1).

use crate::error::SchedulerError;
use crate::types::{EntryDescriptor, EntryKind, EntrySummary, Holder, QueueStats, RecordSlot, Ticks};

pub(crate) const NIL: usize = usize::MAX;

/// Entry metadata copied into each of its records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Stamp {
    pub seq: u64,
    pub ts: Ticks,
    pub kind: EntryKind,
    pub target_queue: usize,
    pub payload_bytes: u64,
    pub task_id: Option<u32>,
    pub program_point: Option<u32>,
    pub job_index: Option<u64>,
    pub segment: usize,
    pub segments: usize,
}

impl Stamp {
    pub fn new(seq: u64, e: &EntryDescriptor, segments: usize) -> Self {
        Self {
            seq,
            ts: e.timestamp,
            kind: e.kind,
            target_queue: e.target_queue,
            payload_bytes: e.payload_bytes,
            task_id: e.task_id,
            program_point: e.program_point,
            job_index: e.job_index,
            segment: 0,
            segments,
        }
    }

    pub fn is_first(&self) -> bool {
        self.segment == 0
    }

    pub fn is_last(&self) -> bool {
        self.segment + 1 == self.segments
    }

    pub fn summary(&self) -> EntrySummary {
        EntrySummary {
            seq: self.seq,
            kind: self.kind,
            ts: self.ts,
            size: self.payload_bytes,
            task: self.task_id,
            pp: self.program_point,
            job: self.job_index,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Slot {
    pub prev: usize,
    pub next: usize,
    pub list: usize,
    pub stamp: Option<Stamp>,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct List {
    pub head: usize,
    pub tail: usize,
    pub len: usize,
    pub entries: usize,
}

impl List {
    fn empty() -> Self {
        Self {
            head: NIL,
            tail: NIL,
            len: 0,
            entries: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SlotPool {
    pub slots: Vec<Slot>,
    pub lists: Vec<List>,
}

impl SlotPool {
    /// Creates `list_count` empty lists and places all `records` slots on `home`.
    pub fn new(records: usize, list_count: usize, home: usize) -> Self {
        let mut pool = Self {
            slots: Vec::with_capacity(records),
            lists: vec![List::empty(); list_count],
        };
        for i in 0..records {
            pool.slots.push(Slot {
                prev: NIL,
                next: NIL,
                list: NIL,
                stamp: None,
            });
            pool.push_back(home, i);
        }
        pool
    }

    pub fn push_back(&mut self, list: usize, slot: usize) {
        let tail = self.lists[list].tail;
        {
            let s = &mut self.slots[slot];
            s.prev = tail;
            s.next = NIL;
            s.list = list;
        }
        if tail == NIL {
            self.lists[list].head = slot;
        } else {
            self.slots[tail].next = slot;
        }
        let l = &mut self.lists[list];
        l.tail = slot;
        l.len += 1;
        if self.slots[slot].stamp.is_some_and(|s| s.is_first()) {
            self.lists[list].entries += 1;
        }
    }

    /// Unlinks and returns the head slot of `list`, or `None` when empty.
    pub fn pop_front(&mut self, list: usize) -> Option<usize> {
        let head = self.lists[list].head;
        if head == NIL {
            return None;
        }
        let next = self.slots[head].next;
        if next == NIL {
            self.lists[list].tail = NIL;
        } else {
            self.slots[next].prev = NIL;
        }
        let l = &mut self.lists[list];
        l.head = next;
        l.len -= 1;
        if self.slots[head].stamp.is_some_and(|s| s.is_first()) {
            self.lists[list].entries -= 1;
        }
        let s = &mut self.slots[head];
        s.next = NIL;
        s.prev = NIL;
        s.list = NIL;
        Some(head)
    }

    pub fn len(&self, list: usize) -> usize {
        self.lists[list].len
    }

    pub fn head_stamp(&self, list: usize) -> Option<&Stamp> {
        let h = self.lists[list].head;
        (h != NIL).then(|| self.slots[h].stamp.as_ref()).flatten()
    }

    pub fn tail_stamp(&self, list: usize) -> Option<&Stamp> {
        let t = self.lists[list].tail;
        (t != NIL).then(|| self.slots[t].stamp.as_ref()).flatten()
    }

    /// Slot indices of `list` from head to tail.
    pub fn iter_list(&self, list: usize) -> ListIter<'_> {
        ListIter {
            pool: self,
            cursor: self.lists[list].head,
        }
    }

    /// Entries of `list`, oldest first.
    pub fn entries(&self, list: usize) -> Vec<EntrySummary> {
        self.iter_list(list)
            .filter_map(|i| self.slots[i].stamp)
            .filter(Stamp::is_first)
            .map(|s| s.summary())
            .collect()
    }

    pub fn stats(&self, list: usize) -> QueueStats {
        let l = &self.lists[list];
        QueueStats {
            length: l.len,
            entry_count: l.entries,
            oldest_ts: self.head_stamp(list).map(|s| s.ts),
            youngest_ts: self.tail_stamp(list).map(|s| s.ts),
        }
    }

    pub fn record_slots(&self, holder: impl Fn(usize) -> Holder) -> Vec<RecordSlot> {
        let link = |i: usize| (i != NIL).then_some(i);
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| RecordSlot {
                slot_index: i,
                holding_queue: holder(s.list),
                entry_seq: s.stamp.map(|st| st.seq),
                segment_index: s.stamp.map_or(0, |st| st.segment),
                prev: link(s.prev),
                next: link(s.next),
            })
            .collect()
    }

    /// Checks link consistency, per-list counters and entry contiguity.
    pub fn audit(&self, entry_lists: &[usize]) -> Result<(), String> {
        let mut seen = vec![false; self.slots.len()];
        for (li, list) in self.lists.iter().enumerate() {
            let mut prev = NIL;
            let mut count = 0usize;
            let mut entries = 0usize;
            let mut open: Option<Stamp> = None;
            for idx in self.iter_list(li) {
                if seen[idx] {
                    return Err(format!("slot {idx} linked twice"));
                }
                seen[idx] = true;
                let s = &self.slots[idx];
                if s.prev != prev || s.list != li {
                    return Err(format!("slot {idx} has broken links"));
                }
                count += 1;
                if s.stamp.is_some() != entry_lists.contains(&li) {
                    return Err(format!("list {li}: slot {idx} has the wrong occupancy"));
                }
                match (open, s.stamp) {
                    (None, Some(st)) if st.is_first() => {
                        entries += 1;
                        if !st.is_last() {
                            open = Some(st);
                        }
                    }
                    (Some(o), Some(st)) if st.seq == o.seq && st.segment == o.segment + 1 => {
                        open = if st.is_last() { None } else { Some(st) };
                    }
                    (None, None) => {}
                    _ => return Err(format!("list {li}: slot {idx} breaks entry atomicity")),
                }
                prev = idx;
            }
            if open.is_some() {
                return Err(format!("list {li} ends inside an entry"));
            }
            if prev != list.tail || count != list.len || entries != list.entries {
                return Err(format!("list {li} counters disagree with its links"));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(format!("slot {i} is in no list"));
        }
        Ok(())
    }
}

/// Front-end checks shared by all schedulers.
pub(crate) fn check_entry(
    e: &EntryDescriptor,
    queue_count: usize,
    last_ts: Option<Ticks>,
) -> Result<(), SchedulerError> {
    if e.target_queue >= queue_count {
        return Err(SchedulerError::UnknownQueue(e.target_queue));
    }
    if let Some(last) = last_ts {
        if e.timestamp < last {
            return Err(SchedulerError::TimestampRegression { last, got: e.timestamp });
        }
    }
    if e.kind == EntryKind::Checkpoint && (e.task_id.is_none() || e.program_point.is_none()) {
        return Err(SchedulerError::IncompleteCheckpoint);
    }
    Ok(())
}

pub(crate) struct ListIter<'a> {
    pool: &'a SlotPool,
    cursor: usize,
}

impl Iterator for ListIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cursor == NIL {
            return None;
        }
        let c = self.cursor;
        self.cursor = self.pool.slots[c].next;
        Some(c)
    }
}
