use std::collections::HashSet;

use proptest::prelude::*;
use rtrlog_core::{suggest_record_size, usable_starting_points, LogSnapshot, RecordSizeWaste};
use rtrlog_reference::{check_analyzer, random_snapshot};

#[test]
fn analyzer_matches_naive_enumerator() {
    for seed in 0..400 {
        let r = random_snapshot(seed);
        if let Err(e) = check_analyzer(&r) {
            panic!("seed {seed}: {e}");
        }
    }
}

#[test]
fn random_snapshots_cover_the_interesting_cases() {
    let (mut usable, mut chained, mut blocked, mut missing) = (0, 0, 0, 0);
    for seed in 0..400 {
        let r = random_snapshot(seed);
        let Ok(rep) = usable_starting_points(&r.snapshot, &r.tasks, r.cf_queue) else {
            missing += 1;
            continue;
        };
        for i in rep.tasks.iter().flat_map(|t| &t.instances) {
            match (i.usable, i.program_point) {
                (true, 0) => usable += 1,
                (true, _) => chained += 1,
                (false, _) => blocked += 1,
            }
        }
    }
    let counts = (usable, chained, blocked, missing);
    assert!(
        usable > 50 && chained > 20 && blocked > 50 && missing > 20,
        "{counts:?}"
    );
}

/// Keeps only a suffix of every queue.
fn shrink(snap: &LogSnapshot, cuts: &[usize]) -> LogSnapshot {
    let mut s = snap.clone();
    for (q, cut) in s.queues.iter_mut().zip(cuts) {
        let n = (*cut).min(q.entries.len());
        q.entries.drain(..n);
    }
    s
}

fn usable_seqs(snap: &LogSnapshot, r: &rtrlog_reference::RandomSnapshot) -> Option<HashSet<u64>> {
    let rep = usable_starting_points(snap, &r.tasks, r.cf_queue).ok()?;
    Some(
        rep.tasks
            .iter()
            .flat_map(|t| &t.instances)
            .filter(|i| i.usable)
            .map(|i| i.checkpoint_seq)
            .collect(),
    )
}

proptest! {
    #[test]
    fn adding_older_entries_never_hurts(seed in any::<u64>(), cuts in prop::collection::vec(0usize..20, 5)) {
        let r = random_snapshot(seed);
        let small = shrink(&r.snapshot, &cuts);
        if let (Some(s), Some(b)) = (usable_seqs(&small, &r), usable_seqs(&r.snapshot, &r)) {
            prop_assert!(s.is_subset(&b), "{:?} not in {:?}", s, b);
        }
    }

    #[test]
    fn usable_instances_are_covered_and_chained(seed in any::<u64>()) {
        let r = random_snapshot(seed);
        let Ok(rep) = usable_starting_points(&r.snapshot, &r.tasks, r.cf_queue) else {
            return Ok(());
        };
        for t in &rep.tasks {
            prop_assert_eq!(t.guaranteed_start_ts.is_some(), t.replay_window.is_some());
            for i in t.instances.iter().filter(|i| i.usable) {
                prop_assert!(rep.control_flow_horizon.is_some_and(|h| i.checkpoint_ts >= h));
                if i.program_point > 0 {
                    prop_assert!(t.instances.iter().any(|p| p.usable
                        && p.program_point == i.program_point - 1
                        && p.job_index == i.job_index));
                }
                prop_assert!(r.snapshot.entries().any(|(_, e)| e.seq == i.checkpoint_seq));
            }
        }
    }
}

#[test]
fn mixed_histogram_waste_by_hand() {
    let hist = [(8, 5), (40, 2)];
    // Records per entry at 8 B: 1 and 5; at 16 B: 1 and 3; at 40 B: 1 and 1.
    let by_hand = [
        (8, 5 * (8 - 8) + 2 * (40 - 40)),
        (16, 5 * (16 - 8) + 2 * (48 - 40)),
        (40, 5 * (40 - 8) + 2 * (40 - 40)),
    ];
    let (best, table) = suggest_record_size(&hist, &[8, 16, 40]).unwrap();
    let want: Vec<RecordSizeWaste> = by_hand
        .iter()
        .map(|&(record_bytes, waste_bytes)| RecordSizeWaste {
            record_bytes,
            waste_bytes,
        })
        .collect();
    assert_eq!(table, want);
    assert_eq!(best, 8);
}
