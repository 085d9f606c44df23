//! Scenario description and crash-instant sampling.
//!
//! A run drives the whole trace through one scheduler and, at each sampled
//! crash instant, analyzes the log as it stood after every event at or
//! before that instant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::drive::{entry_for, route, DriveError};
use super::trace::{validate_tasks, SpecError, TaskSpec, TraceEvent};
use crate::analyzer::{recommend_config, usable_starting_points, AnalyzeError, RoleMap, TaskMeta};
use crate::baseline::{Gfifo, Lfifo, LfifoConfig};
use crate::ecetes::Ecetes;
use crate::error::ConfigError;
use crate::scheduler::EvictionScheduler;
use crate::types::{LogSnapshot, PoolConfig, QueueConfig, Ticks};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerChoice {
    /// `queues` defaults to the recommended layout.
    Ecetes {
        #[serde(default)]
        queues: Option<Vec<QueueConfig>>,
    },
    Gfifo,
    /// `caps` defaults to the scenario's [`LfifoPolicy`].
    Lfifo {
        #[serde(default)]
        caps: Option<Vec<usize>>,
    },
}

impl SchedulerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SchedulerChoice::Ecetes { .. } => "ecetes",
            SchedulerChoice::Gfifo => "gfifo",
            SchedulerChoice::Lfifo { .. } => "lfifo",
        }
    }

    /// Default-configured scheduler by name.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ecetes" => Some(SchedulerChoice::Ecetes { queues: None }),
            "gfifo" => Some(SchedulerChoice::Gfifo),
            "lfifo" => Some(SchedulerChoice::Lfifo { caps: None }),
            _ => None,
        }
    }
}

impl Default for SchedulerChoice {
    fn default() -> Self {
        SchedulerChoice::Ecetes { queues: None }
    }
}

/// How LFIFO capacities are derived when not given explicitly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfifoPolicy {
    #[default]
    Equal,
    /// Proportional to the records each queue receives over the trace.
    Proportional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub duration: Ticks,
    pub tasks: Vec<TaskSpec>,
    pub pool: PoolConfig,
    #[serde(default)]
    pub scheduler: SchedulerChoice,
    #[serde(default)]
    pub lfifo_policy: LfifoPolicy,
    pub crash_samples: usize,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.duration == 0 {
            return Err(SpecError::ZeroDuration);
        }
        if self.crash_samples == 0 {
            return Err(SpecError::ZeroCrashSamples);
        }
        validate_tasks(&self.tasks)
    }

    pub fn task_metas(&self) -> Vec<TaskMeta> {
        self.tasks.iter().map(TaskSpec::meta).collect()
    }

    /// First instant that counts: a quarter of the duration, rounded down.
    pub fn warmup(&self) -> Ticks {
        self.duration / 4
    }

    /// `crash_samples` instants evenly spaced in `(warmup, duration]`.
    pub fn crash_instants(&self) -> Vec<Ticks> {
        let warmup = self.warmup();
        let span = (self.duration - warmup) as u128;
        let n = self.crash_samples as u128;
        (1..=n).map(|i| warmup + (i * span / n) as Ticks).collect()
    }

    /// Builds the scheduler named by `choice` over the recommended queue
    /// layout, which also supplies the routing for every scheduler.
    pub fn build_scheduler(
        &self,
        choice: &SchedulerChoice,
        trace: &[TraceEvent],
    ) -> Result<(Box<dyn EvictionScheduler>, RoleMap), ConfigError> {
        let (queues, roles) = recommend_config(&self.task_metas(), &self.pool)?;
        let sched: Box<dyn EvictionScheduler> = match choice {
            SchedulerChoice::Ecetes { queues: custom } => {
                Box::new(Ecetes::new(self.pool, custom.as_deref().unwrap_or(&queues))?)
            }
            SchedulerChoice::Gfifo => Box::new(Gfifo::new(self.pool)?),
            SchedulerChoice::Lfifo { caps } => {
                let caps = match (caps, self.lfifo_policy) {
                    (Some(c), _) => LfifoConfig { capacities: c.clone() },
                    (None, LfifoPolicy::Equal) => LfifoConfig::equal_split(&self.pool)?,
                    (None, LfifoPolicy::Proportional) => {
                        LfifoConfig::proportional(&self.pool, &traffic(&self.pool, trace, &roles))?
                    }
                };
                Box::new(Lfifo::new(self.pool, caps)?)
            }
        };
        Ok((sched, roles))
    }
}

/// Records routed to each queue over the whole trace.
fn traffic(pool: &PoolConfig, trace: &[TraceEvent], roles: &RoleMap) -> Vec<u64> {
    let mut w = vec![0u64; pool.queue_count];
    for e in trace {
        if let Ok(q) = route(e, roles) {
            w[q] += pool.records_for(e.payload_bytes);
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Drive(#[from] DriveError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    pub task_id: u32,
    /// Fraction of crash instants with at least one usable starting point.
    pub availability_rate: f64,
    /// Mean replay window over the instants where one exists.
    pub mean_replay_window: Option<f64>,
    /// Usable instances summed over all crash instants.
    pub usable_instances: u64,
    /// Checkpoint instances present, summed over all crash instants.
    pub checkpoint_instances: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scheduler: String,
    pub tasks: Vec<TaskMetrics>,
    pub drop_count: u64,
    pub max_steps: u64,
    /// Mean fraction of the pool occupied at the crash instants.
    pub utilization: f64,
}

/// Snapshots taken at each crash instant plus whole-run counters.
#[derive(Debug, Clone)]
pub struct SampledRun {
    pub scheduler: &'static str,
    pub roles: RoleMap,
    pub snapshots: Vec<LogSnapshot>,
    pub occupied: Vec<usize>,
    pub max_steps: u64,
    pub drop_count: u64,
}

pub fn sample_snapshots(trace: &[TraceEvent], scenario: &ScenarioConfig) -> Result<SampledRun, SimError> {
    scenario.validate()?;
    let (mut sched, roles) = scenario.build_scheduler(&scenario.scheduler, trace)?;
    let instants = scenario.crash_instants();
    let mut snapshots = Vec::with_capacity(instants.len());
    let mut occupied = Vec::with_capacity(instants.len());
    let mut max_steps = 0;
    let mut next = 0;
    let pool = sched.pool().pool_records;
    let mut take = |sched: &dyn EvictionScheduler, upto: Option<Ticks>, next: &mut usize| {
        while *next < instants.len() && upto.is_none_or(|t| instants[*next] < t) {
            snapshots.push(sched.snapshot(instants[*next]));
            occupied.push(pool - sched.free_records());
            *next += 1;
        }
    };
    for event in trace {
        take(sched.as_ref(), Some(event.at), &mut next);
        let entry = entry_for(event, route(event, &roles)?);
        let out = sched.insert_entry(&entry).map_err(DriveError::from)?;
        max_steps = max_steps.max(out.steps);
    }
    take(sched.as_ref(), None, &mut next);
    Ok(SampledRun {
        scheduler: sched.name(),
        roles,
        snapshots,
        occupied,
        max_steps,
        drop_count: sched.drop_count(),
    })
}

pub fn sample_crash_metrics(trace: &[TraceEvent], scenario: &ScenarioConfig) -> Result<MetricsReport, SimError> {
    let run = sample_snapshots(trace, scenario)?;
    let metas = scenario.task_metas();
    let cf = run
        .roles
        .control_flow_queue()
        .expect("recommended layout has a control-flow queue");
    let samples = run.snapshots.len() as f64;

    #[derive(Default)]
    struct Acc {
        available: u64,
        window_sum: u128,
        windows: u64,
        usable: u64,
        seen: u64,
    }
    let mut acc: Vec<Acc> = metas.iter().map(|_| Acc::default()).collect();
    for snap in &run.snapshots {
        let report = usable_starting_points(snap, &metas, cf)?;
        for (a, t) in acc.iter_mut().zip(&report.tasks) {
            let usable = t.usable_count() as u64;
            a.usable += usable;
            a.seen += t.instances.len() as u64;
            if usable > 0 {
                a.available += 1;
            }
            if let Some(w) = t.replay_window {
                a.window_sum += w as u128;
                a.windows += 1;
            }
        }
    }
    let pool = scenario.pool.pool_records as f64;
    let utilization = run.occupied.iter().map(|&o| o as f64 / pool).sum::<f64>() / samples;
    Ok(MetricsReport {
        scheduler: run.scheduler.to_string(),
        tasks: metas
            .iter()
            .zip(acc)
            .map(|(m, a)| TaskMetrics {
                task_id: m.task_id,
                availability_rate: a.available as f64 / samples,
                mean_replay_window: (a.windows > 0).then(|| a.window_sum as f64 / a.windows as f64),
                usable_instances: a.usable,
                checkpoint_instances: a.seen,
            })
            .collect(),
        drop_count: run.drop_count,
        max_steps: run.max_steps,
        utilization,
    })
}
