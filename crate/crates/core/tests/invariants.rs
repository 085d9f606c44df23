use proptest::prelude::*;
use rtrlog_core::{
    Ecetes, EntryDescriptor, EvictionScheduler, Gfifo, InsertOutcome, InsertStatus, Lfifo, LfifoConfig, LogSnapshot,
    PoolConfig, QueueStats, RecordSlot, SchedulerError, Ticks,
};
use rtrlog_reference::{check_scenario, random_scenario, Checks, InvariantMonitor, Policy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_step_keeps_the_structural_invariants(seed in any::<u64>(), inserts in 1usize..400) {
        let s = random_scenario(seed, inserts);
        let checks = Checks { snapshot_every: 0, invariants: true };
        if let Err(e) = check_scenario(&s, checks) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn same_input_same_outcomes(seed in any::<u64>()) {
        let s = random_scenario(seed, 300);
        let run = || {
            let mut e = Ecetes::new(s.pool, &s.queues).unwrap();
            let outs: Vec<_> = s.entries.iter().map(|x| e.insert_entry(x).unwrap()).collect();
            (outs, e.snapshot(1_000_000))
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn rejection_leaves_state_untouched(seed in any::<u64>()) {
        let s = random_scenario(seed, 300);
        let mut e = Ecetes::new(s.pool, &s.queues).unwrap();
        for x in &s.entries {
            let before = e.snapshot(x.timestamp);
            let free = e.free_records();
            let out = e.insert_entry(x).unwrap();
            let after = e.snapshot(x.timestamp);
            match out.status {
                InsertStatus::Accepted => {}
                InsertStatus::RejectedTooLarge => {
                    prop_assert_eq!(&before, &after);
                    prop_assert_eq!(free, e.free_records());
                }
                InsertStatus::RejectedNoEligibleVictim => {
                    prop_assert_eq!(&before.queues, &after.queues);
                    prop_assert_eq!(before.drop_count + 1, after.drop_count);
                    prop_assert_eq!(free, e.free_records());
                }
            }
        }
    }

    #[test]
    fn steps_do_not_depend_on_history(seed in any::<u64>()) {
        let s = random_scenario(seed, 300);
        let mut e = Ecetes::new(s.pool, &s.queues).unwrap();
        let budget = Ecetes::step_budget(s.pool.queue_count, s.pool.max_records_per_entry);
        for x in &s.entries {
            prop_assert_eq!(e.insert_entry(x).unwrap().steps, budget);
        }
    }

    #[test]
    fn baseline_steps_have_a_history_free_bound(seed in any::<u64>()) {
        let s = random_scenario(seed, 300);
        let bound = 3 * s.pool.max_records_per_entry as u64 + 1;
        let mut g = Gfifo::new(s.pool).unwrap();
        let caps = LfifoConfig { capacities: s.caps.clone() };
        let mut l = Lfifo::new(s.pool, caps).unwrap();
        for x in &s.entries {
            prop_assert!(g.insert_entry(x).unwrap().steps <= bound);
            prop_assert!(l.insert_entry(x).unwrap().steps <= bound);
        }
    }
}

#[test]
fn monitor_catches_a_broken_scheduler() {
    // A scheduler that lies about free space must trip conservation.
    struct Leaky(Ecetes);
    impl EvictionScheduler for Leaky {
        fn name(&self) -> &'static str {
            "leaky"
        }
        fn pool(&self) -> &PoolConfig {
            self.0.pool()
        }
        fn insert_entry(&mut self, e: &EntryDescriptor) -> Result<InsertOutcome, SchedulerError> {
            self.0.insert_entry(e)
        }
        fn snapshot(&self, now: Ticks) -> LogSnapshot {
            self.0.snapshot(now)
        }
        fn queue_stats(&self, q: usize) -> Result<QueueStats, SchedulerError> {
            self.0.queue_stats(q)
        }
        fn free_records(&self) -> usize {
            self.0.free_records() + 1
        }
        fn drop_count(&self) -> u64 {
            self.0.drop_count()
        }
        fn record_slots(&self) -> Vec<RecordSlot> {
            self.0.record_slots()
        }
        fn audit(&self) -> Result<(), String> {
            self.0.audit()
        }
    }
    let s = random_scenario(7, 5);
    let mut leaky = Leaky(Ecetes::new(s.pool, &s.queues).unwrap());
    let mut mon = InvariantMonitor::new(s.pool.queue_count, Policy::Ecetes(s.queues.clone()));
    let out = leaky.insert_entry(&s.entries[0]).unwrap();
    assert!(mon
        .check(&leaky, &s.entries[0], &out)
        .unwrap_err()
        .contains("conservation"));
}
