use proptest::prelude::*;
use rtrlog_core::sim::{
    entry_for, generate_trace, parse_trace, route, sample_crash_metrics, sample_snapshots, trace_to_string, Activation,
    InputSpec, ProgramPointSpec, ScenarioConfig, SchedulerChoice, TaskSpec, TraceEvent,
};
use rtrlog_core::{
    usable_starting_points, EntryDescriptor, EntryKind, EvictionScheduler, Gfifo, Lfifo, LfifoConfig, PoolConfig,
};
use rtrlog_reference::{chatty_quiet, check_guarantee, guarantee_scenario};

fn task(id: u32, activation: Activation, pps: &[(u64, u64)], inputs: &[(u64, u64)]) -> TaskSpec {
    TaskSpec {
        task_id: id,
        activation,
        program_points: pps
            .iter()
            .map(|&(offset, checkpoint_bytes)| ProgramPointSpec {
                offset,
                checkpoint_bytes,
            })
            .collect(),
        inputs_per_job: inputs
            .iter()
            .map(|&(offset, payload_bytes)| InputSpec { offset, payload_bytes })
            .collect(),
    }
}

fn golden_tasks() -> Vec<TaskSpec> {
    vec![
        task(
            0,
            Activation::Periodic { period: 50, offset: 5 },
            &[(2, 24), (6, 40)],
            &[(3, 8), (4, 100)],
        ),
        task(
            1,
            Activation::Sporadic {
                min_interarrival: 30,
                arrival_prob_permille: 150,
            },
            &[(1, 16)],
            &[(2, 12)],
        ),
        task(
            2,
            Activation::Sporadic {
                min_interarrival: 20,
                arrival_prob_permille: 600,
            },
            &[(1, 8), (3, 8), (5, 8)],
            &[],
        ),
    ]
}

#[test]
fn seed_42_trace_matches_golden() {
    let trace = generate_trace(&golden_tasks(), 400, 42).unwrap();
    let golden = include_str!("golden/seed42.trace");
    assert_eq!(trace_to_string(&trace), golden);
    assert_eq!(parse_trace(golden).unwrap(), trace);
}

fn arb_task(id: u32) -> impl Strategy<Value = TaskSpec> {
    let activation = prop_oneof![
        (1u64..60, 0u64..60).prop_map(|(period, offset)| Activation::Periodic { period, offset }),
        (1u64..60, 0u32..=1000).prop_map(|(min_interarrival, arrival_prob_permille)| Activation::Sporadic {
            min_interarrival,
            arrival_prob_permille,
        }),
    ];
    (
        activation,
        prop::collection::vec((1u64..6, 1u64..64), 1..4),
        prop::collection::vec((0u64..20, 0u64..64), 0..3),
    )
        .prop_map(move |(activation, steps, inputs)| {
            let mut offset = 0;
            let pps: Vec<(u64, u64)> = steps
                .into_iter()
                .map(|(d, b)| {
                    offset += d;
                    (offset, b)
                })
                .collect();
            task(id, activation, &pps, &inputs)
        })
}

fn arb_tasks() -> impl Strategy<Value = Vec<TaskSpec>> {
    (arb_task(0), arb_task(1), arb_task(2), 1usize..=3).prop_map(|(a, b, c, n)| {
        let mut v = vec![a, b, c];
        v.truncate(n);
        v
    })
}

fn scenario(tasks: Vec<TaskSpec>, seed: u64, duration: u64, records: usize, samples: usize) -> ScenarioConfig {
    let queue_count = 1 + tasks.iter().map(|t| t.program_points.len()).sum::<usize>();
    ScenarioConfig {
        seed,
        duration,
        tasks,
        pool: PoolConfig {
            pool_records: records.max(queue_count * 4),
            record_payload_bytes: 16,
            max_records_per_entry: 4,
            queue_count,
        },
        scheduler: SchedulerChoice::default(),
        lfifo_policy: Default::default(),
        crash_samples: samples,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traces_are_sorted_bounded_and_round_trip(tasks in arb_tasks(), seed in any::<u64>(), duration in 1u64..500) {
        let trace = generate_trace(&tasks, duration, seed).unwrap();
        prop_assert!(trace.windows(2).all(|w| w[0].sort_key() <= w[1].sort_key()));
        prop_assert!(trace.iter().all(|e| e.at < duration));
        prop_assert!(trace.iter().all(|e| (e.kind == EntryKind::Checkpoint) == e.program_point.is_some()));
        prop_assert_eq!(&generate_trace(&tasks, duration, seed).unwrap(), &trace);
        prop_assert_eq!(parse_trace(&trace_to_string(&trace)).unwrap(), trace);
    }

    #[test]
    fn sporadic_jobs_respect_min_interarrival(min in 1u64..40, p in 0u32..=1000, seed in any::<u64>()) {
        let t = task(0, Activation::Sporadic { min_interarrival: min, arrival_prob_permille: p }, &[(1, 8)], &[]);
        let trace = generate_trace(&[t], 2000, seed).unwrap();
        let starts: Vec<u64> = trace.iter().filter(|e| e.kind == EntryKind::Checkpoint).map(|e| e.at - 1).collect();
        prop_assert!(starts.windows(2).all(|w| w[1] - w[0] >= min));
    }

    #[test]
    fn sampled_snapshots_equal_fresh_truncated_runs(
        tasks in arb_tasks(),
        seed in any::<u64>(),
        records in 4usize..40,
        which in 0usize..3,
    ) {
        let mut sc = scenario(tasks, seed, 400, records, 7);
        sc.scheduler = [SchedulerChoice::default(), SchedulerChoice::Gfifo, SchedulerChoice::Lfifo { caps: None }][which].clone();
        let trace = generate_trace(&sc.tasks, sc.duration, sc.seed).unwrap();
        let run = sample_snapshots(&trace, &sc).unwrap();
        for (snap, &t) in run.snapshots.iter().zip(&sc.crash_instants()) {
            prop_assert_eq!(snap.taken_at, t);
            let prefix: Vec<TraceEvent> = trace.iter().copied().filter(|e| e.at <= t).collect();
            let (mut fresh, roles) = sc.build_scheduler(&sc.scheduler, &trace).unwrap();
            for e in &prefix {
                fresh.insert_entry(&entry_for(e, route(e, &roles).unwrap())).unwrap();
            }
            prop_assert_eq!(&fresh.snapshot(t), snap);
        }
    }

    #[test]
    fn report_values_are_in_range(tasks in arb_tasks(), seed in any::<u64>(), records in 4usize..40) {
        let sc = scenario(tasks, seed, 300, records, 5);
        let trace = generate_trace(&sc.tasks, sc.duration, sc.seed).unwrap();
        for choice in [SchedulerChoice::default(), SchedulerChoice::Gfifo, SchedulerChoice::Lfifo { caps: None }] {
            let sc = ScenarioConfig { scheduler: choice, ..sc.clone() };
            let r = sample_crash_metrics(&trace, &sc).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.utilization));
            for t in &r.tasks {
                prop_assert!((0.0..=1.0).contains(&t.availability_rate));
                prop_assert!(t.usable_instances <= t.checkpoint_instances);
                prop_assert_eq!(t.mean_replay_window.is_some(), t.usable_instances > 0);
            }
        }
    }
}

/// Usable starting points of `task` at each sampled instant.
fn usable_per_instant(sc: &ScenarioConfig, choice: SchedulerChoice, task: u32) -> Vec<usize> {
    let sc = ScenarioConfig {
        scheduler: choice,
        ..sc.clone()
    };
    let trace = generate_trace(&sc.tasks, sc.duration, sc.seed).unwrap();
    let run = sample_snapshots(&trace, &sc).unwrap();
    let cf = run.roles.control_flow_queue().unwrap();
    run.snapshots
        .iter()
        .map(|s| {
            let rep = usable_starting_points(s, &sc.task_metas(), cf).unwrap();
            rep.tasks.iter().find(|t| t.task_id == task).unwrap().usable_count()
        })
        .collect()
}

#[test]
fn chatty_neighbour_starves_the_quiet_task_only_under_global_fifo() {
    let sc = chatty_quiet();
    assert_eq!(sc.crash_instants(), (3_000..=10_000).step_by(500).collect::<Vec<_>>());
    let gfifo = usable_per_instant(&sc, SchedulerChoice::Gfifo, 1);
    let ecetes = usable_per_instant(&sc, SchedulerChoice::default(), 1);
    let lfifo = usable_per_instant(&sc, SchedulerChoice::Lfifo { caps: None }, 1);
    assert!(gfifo.iter().all(|&n| n == 0), "{gfifo:?}");
    assert!(ecetes.iter().all(|&n| n >= 1), "{ecetes:?}");
    assert!(lfifo.iter().zip(&ecetes).all(|(l, e)| l <= e));

    let trace = generate_trace(&sc.tasks, sc.duration, sc.seed).unwrap();
    let rate = |choice| {
        let sc = ScenarioConfig {
            scheduler: choice,
            ..sc.clone()
        };
        sample_crash_metrics(&trace, &sc).unwrap().tasks[1].availability_rate
    };
    assert_eq!(rate(SchedulerChoice::Gfifo), 0.0);
    assert_eq!(rate(SchedulerChoice::default()), 1.0);
}

#[test]
fn recommended_layout_keeps_a_starting_point_for_every_task() {
    let mut evicted = 0;
    for seed in 0..12 {
        let stats = check_guarantee(&guarantee_scenario(seed)).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(stats.instants_checked > 0, "seed {seed}");
        evicted += stats.control_flow_evicted as usize;
    }
    assert!(evicted >= 10, "control flow was rarely under pressure: {evicted}");
}

fn pool(records: usize) -> PoolConfig {
    PoolConfig {
        pool_records: records,
        record_payload_bytes: 16,
        max_records_per_entry: 2,
        queue_count: 2,
    }
}

fn quiet_then_chatty() -> Vec<EntryDescriptor> {
    let mut v = vec![EntryDescriptor::checkpoint(1, 0, 16, 1, 0, 0)];
    v.extend((1..=8).map(|t| EntryDescriptor::new(0, EntryKind::Input, t, 16).with_task(0, 0)));
    v
}

#[test]
fn global_fifo_loses_the_quiet_checkpoint() {
    let mut g = Gfifo::new(pool(8)).unwrap();
    for e in quiet_then_chatty() {
        g.insert_entry(&e).unwrap();
    }
    assert!(g.snapshot(9).entries().all(|(_, e)| e.kind != EntryKind::Checkpoint));
}

#[test]
fn reserved_local_capacity_keeps_the_quiet_checkpoint() {
    let caps = LfifoConfig { capacities: vec![6, 2] };
    let mut l = Lfifo::new(pool(8), caps).unwrap();
    for e in quiet_then_chatty() {
        l.insert_entry(&e).unwrap();
    }
    let snap = l.snapshot(9);
    assert_eq!(snap.queues[1].entries.len(), 1);
    assert_eq!(snap.queues[1].entries[0].kind, EntryKind::Checkpoint);
}

#[test]
fn scenarios_and_snapshots_round_trip_through_json() {
    let sc = chatty_quiet();
    let text = serde_json::to_string(&sc).unwrap();
    assert_eq!(serde_json::from_str::<ScenarioConfig>(&text).unwrap(), sc);

    let trace = generate_trace(&sc.tasks, sc.duration, sc.seed).unwrap();
    let run = sample_snapshots(&trace, &sc).unwrap();
    let snap = run.snapshots.last().unwrap();
    let text = serde_json::to_string(snap).unwrap();
    assert!(!text.contains("\"pp\":null"));
    assert_eq!(&serde_json::from_str::<rtrlog_core::LogSnapshot>(&text).unwrap(), snap);

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["extra"] = serde_json::json!(1);
    assert!(serde_json::from_value::<rtrlog_core::LogSnapshot>(v).is_err());
}
