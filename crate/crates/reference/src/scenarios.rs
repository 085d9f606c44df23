//! Hand-built and fuzzed simulation scenarios.

use rtrlog_core::sim::{
    generate_trace, sample_snapshots, Activation, InputSpec, LfifoPolicy, ProgramPointSpec, ScenarioConfig,
    SchedulerChoice, SplitMix64, TaskSpec, TraceEvent,
};
use rtrlog_core::{usable_starting_points, EntryKind, Flow, PoolConfig, QueueRole, Ticks};

/// Task 0 logs a 16 B record on every tick of its 499-tick jobs; task 1
/// logs one 16 B checkpoint every 500 ticks. Eight 16 B records.
pub fn chatty_quiet() -> ScenarioConfig {
    ScenarioConfig {
        seed: 7,
        duration: 10_000,
        tasks: vec![
            TaskSpec {
                task_id: 0,
                activation: Activation::Periodic { period: 500, offset: 0 },
                program_points: vec![ProgramPointSpec {
                    offset: 1,
                    checkpoint_bytes: 16,
                }],
                inputs_per_job: (2..=498)
                    .map(|offset| InputSpec {
                        offset,
                        payload_bytes: 16,
                    })
                    .collect(),
            },
            TaskSpec {
                task_id: 1,
                activation: Activation::Periodic {
                    period: 500,
                    offset: 250,
                },
                program_points: vec![ProgramPointSpec {
                    offset: 1,
                    checkpoint_bytes: 16,
                }],
                inputs_per_job: vec![],
            },
        ],
        pool: PoolConfig {
            pool_records: 8,
            record_payload_bytes: 16,
            max_records_per_entry: 2,
            queue_count: 3,
        },
        scheduler: SchedulerChoice::default(),
        lfifo_policy: LfifoPolicy::Equal,
        crash_samples: 15,
    }
}

struct Rng(SplitMix64);

impl Rng {
    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.0.next_u64() % (hi - lo + 1)
    }
}

/// Largest number of control-flow events inside any closed window of
/// `width` ticks.
fn busiest_window(trace: &[TraceEvent], width: Ticks) -> usize {
    let times: Vec<Ticks> = trace
        .iter()
        .filter(|e| e.kind.flow() == Flow::ControlFlow)
        .map(|e| e.at)
        .collect();
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..times.len() {
        while times[hi] - times[lo] > width {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

/// Longest stretch during which a task has no fresh first checkpoint: the
/// largest gap between consecutive first-program-point checkpoints, also
/// counting the tail up to `duration`.
fn longest_checkpoint_gap(trace: &[TraceEvent], task: u32, duration: Ticks) -> Ticks {
    let mut last: Option<Ticks> = None;
    let mut gap = 0;
    for e in trace {
        if e.task_id == task && e.kind == EntryKind::Checkpoint && e.program_point == Some(0) {
            if let Some(l) = last {
                gap = gap.max(e.at - l);
            }
            last = Some(e.at);
        }
    }
    if let Some(l) = last {
        gap = gap.max(duration - l);
    }
    gap
}

/// Random checkpoint-only task set with a pool large enough for the
/// control-flow queue to span the longest checkpoint gap of every task,
/// while still being far too small to keep the whole run.
pub fn guarantee_scenario(seed: u64) -> ScenarioConfig {
    let mut rng = Rng(SplitMix64::new(seed));
    let record = 16;
    let tasks: Vec<TaskSpec> = (0..rng.range(1, 3) as u32)
        .map(|task_id| {
            let activation = if rng.range(0, 1) == 0 {
                let period = rng.range(20, 200);
                Activation::Periodic {
                    period,
                    offset: rng.range(0, period - 1),
                }
            } else {
                Activation::Sporadic {
                    min_interarrival: rng.range(10, 100),
                    arrival_prob_permille: rng.range(50, 1000) as u32,
                }
            };
            let mut offset = 0;
            let program_points = (0..rng.range(1, 3))
                .map(|_| {
                    offset += rng.range(1, 10);
                    ProgramPointSpec {
                        offset,
                        checkpoint_bytes: rng.range(1, 3 * record),
                    }
                })
                .collect();
            TaskSpec {
                task_id,
                activation,
                program_points,
                inputs_per_job: vec![],
            }
        })
        .collect();
    let duration = rng.range(2_000, 5_000);
    let seed = rng.0.next_u64();
    let records = |b: u64| b.div_ceil(record).max(1) as usize;
    let lmax = tasks
        .iter()
        .flat_map(|t| &t.program_points)
        .map(|p| records(p.checkpoint_bytes))
        .max()
        .unwrap_or(1);
    let queue_count = 1 + tasks.iter().map(|t| t.program_points.len()).sum::<usize>();

    let trace = generate_trace(&tasks, duration, seed).expect("generated tasks are valid");
    let width = tasks
        .iter()
        .map(|t| longest_checkpoint_gap(&trace, t.task_id, duration) + t.program_points[0].offset)
        .max()
        .unwrap_or(0);
    let data: usize = tasks
        .iter()
        .flat_map(|t| &t.program_points)
        .map(|p| 2 * records(p.checkpoint_bytes) + lmax)
        .sum();
    let pool_records = data + lmax + busiest_window(&trace, width) + 1 + rng.range(0, 4) as usize;

    ScenarioConfig {
        seed,
        duration,
        tasks,
        pool: PoolConfig {
            pool_records,
            record_payload_bytes: record,
            max_records_per_entry: lmax,
            queue_count,
        },
        scheduler: SchedulerChoice::default(),
        lfifo_policy: LfifoPolicy::Equal,
        crash_samples: 20,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GuaranteeStats {
    /// Instants at which every (task, program point) had logged a checkpoint.
    pub instants_checked: usize,
    /// Whether the control-flow queue lost entries before the last instant.
    pub control_flow_evicted: bool,
}

/// Runs `scenario` under the recommended layout and checks that every task
/// has a usable starting point at every instant where each of its
/// (task, program point) pairs has been checkpointed at least once.
/// Also checks that every data-flow queue then holds a checkpoint.
pub fn check_guarantee(scenario: &ScenarioConfig) -> Result<GuaranteeStats, String> {
    let trace = generate_trace(&scenario.tasks, scenario.duration, scenario.seed).map_err(|e| e.to_string())?;
    let mut sc = scenario.clone();
    sc.scheduler = SchedulerChoice::default();
    let run = sample_snapshots(&trace, &sc).map_err(|e| e.to_string())?;
    let metas = sc.task_metas();
    let cf = run.roles.control_flow_queue().ok_or("no control-flow queue")?;
    let mut stats = GuaranteeStats::default();
    for snap in &run.snapshots {
        let t = snap.taken_at;
        let absorbed = scenario.tasks.iter().all(|task| {
            (0..task.program_points.len() as u32).all(|pp| {
                trace.iter().any(|e| {
                    e.at <= t
                        && e.task_id == task.task_id
                        && e.kind == EntryKind::Checkpoint
                        && e.program_point == Some(pp)
                })
            })
        });
        let cf_logged = trace
            .iter()
            .filter(|e| e.at <= t && e.kind.flow() == Flow::ControlFlow)
            .count();
        let cf_held = snap.queue(cf).map_or(0, |q| q.entries.len());
        stats.control_flow_evicted |= cf_held < cf_logged;
        if !absorbed {
            continue;
        }
        stats.instants_checked += 1;
        for (q, role) in run.roles.roles.iter().enumerate() {
            if let QueueRole::DataFlow { task_id, program_point } = role {
                let held = snap.queue(q).is_some_and(|qs| {
                    qs.entries.iter().any(|e| {
                        e.kind == EntryKind::Checkpoint && e.task == Some(*task_id) && e.pp == Some(*program_point)
                    })
                });
                if !held {
                    return Err(format!(
                        "t={t}: queue {q} holds no checkpoint of ({task_id}, {program_point})"
                    ));
                }
            }
        }
        let report = usable_starting_points(snap, &metas, cf).map_err(|e| e.to_string())?;
        if let Some(task) = report.tasks.iter().find(|a| a.usable_count() == 0) {
            return Err(format!(
                "t={t}: task {} has no usable starting point (horizon {:?})",
                task.task_id, report.control_flow_horizon
            ));
        }
    }
    Ok(stats)
}
