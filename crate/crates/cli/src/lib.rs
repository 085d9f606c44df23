//! Commands behind the `rtrlog` binary.
//!
//! Every command reads JSON inputs, writes JSON (or trace text) outputs and
//! maps failures onto a fixed set of exit codes, see [`CliError::exit_code`].

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rtrlog_core::sim::{
    generate_trace, sample_crash_metrics, sample_snapshots, write_trace, MetricsReport, ScenarioConfig,
    SchedulerChoice, SimError, SpecError, TraceEvent,
};
use rtrlog_core::{
    usable_starting_points, AnalyzeError, AvailabilityReport, ConfigError, LogSnapshot, QueueId, TaskMeta,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_UNKNOWN_SCHEDULER: i32 = 4;
pub const EXIT_CONFIG: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Spec { path: PathBuf, source: SpecError },
    #[error("{}: {source}", path.display())]
    Snapshot { path: PathBuf, source: AnalyzeError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("unknown scheduler `{0}` (expected ecetes, gfifo or lfifo)")]
    UnknownScheduler(String),
    #[error("configuration rejected: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Spec { .. } | CliError::Snapshot { .. } => EXIT_PARSE,
            CliError::Io { .. } => EXIT_IO,
            CliError::UnknownScheduler(_) => EXIT_UNKNOWN_SCHEDULER,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `path`, or to stdout when `path` is `None`.
fn write_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_err(p))?;
            let mut out = BufWriter::new(file);
            write(&mut out).and_then(|_| out.flush()).map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T, stamp: bool) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Stamped<'a, T> {
        #[serde(flatten)]
        inner: &'a T,
        #[serde(skip_serializing_if = "Option::is_none")]
        stamp: Option<u64>,
    }
    let stamp = stamp.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    let doc = Stamped { inner: value, stamp };
    write_output(path, |out| {
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    })
}

fn sim_err(e: SimError, scenario: &Path) -> CliError {
    match e {
        SimError::Spec(source) => CliError::Spec {
            path: scenario.to_path_buf(),
            source,
        },
        SimError::Config(c) => CliError::Config(c),
        other => CliError::Internal(other.to_string()),
    }
}

/// Parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, CliError> {
    let sc: ScenarioConfig = read_json(path)?;
    sc.validate().map_err(|source| CliError::Spec {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(sc)
}

fn trace_of(sc: &ScenarioConfig, path: &Path) -> Result<Vec<TraceEvent>, CliError> {
    generate_trace(&sc.tasks, sc.duration, sc.seed).map_err(|source| CliError::Spec {
        path: path.to_path_buf(),
        source,
    })
}

/// The scenario's own configuration when `name` matches it, otherwise the
/// default configuration of the named scheduler.
pub fn resolve_scheduler(sc: &ScenarioConfig, name: Option<&str>) -> Result<SchedulerChoice, CliError> {
    let Some(name) = name else {
        return Ok(sc.scheduler.clone());
    };
    let choice = SchedulerChoice::from_name(name).ok_or_else(|| CliError::UnknownScheduler(name.to_string()))?;
    if choice.name() == sc.scheduler.name() {
        Ok(sc.scheduler.clone())
    } else {
        Ok(choice)
    }
}

pub fn gen_trace(scenario: &Path, out: &Path) -> Result<(), CliError> {
    let sc = load_scenario(scenario)?;
    let trace = trace_of(&sc, scenario)?;
    write_output(Some(out), |w| write_trace(&trace, w))
}

pub struct RunArgs<'a> {
    pub scenario: &'a Path,
    pub out: Option<&'a Path>,
    pub scheduler: Option<&'a str>,
    pub stamp: bool,
    /// Where to store the snapshot taken at the last crash instant.
    pub snapshot_out: Option<&'a Path>,
}

pub fn run(args: &RunArgs) -> Result<MetricsReport, CliError> {
    let mut sc = load_scenario(args.scenario)?;
    sc.scheduler = resolve_scheduler(&sc, args.scheduler)?;
    let trace = trace_of(&sc, args.scenario)?;
    let report = sample_crash_metrics(&trace, &sc).map_err(|e| sim_err(e, args.scenario))?;
    if let Some(path) = args.snapshot_out {
        let run = sample_snapshots(&trace, &sc).map_err(|e| sim_err(e, args.scenario))?;
        let last = run
            .snapshots
            .last()
            .ok_or_else(|| CliError::Internal("no crash instants".into()))?;
        write_json(Some(path), last, false)?;
    }
    write_json(args.out, &report, args.stamp)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub scheduler: String,
    pub task_id: u32,
    pub availability_rate: f64,
    pub mean_replay_window: Option<f64>,
    pub drop_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub reports: Vec<MetricsReport>,
    pub table: Vec<TableRow>,
}

impl Comparison {
    pub fn from_reports(reports: Vec<MetricsReport>) -> Self {
        let table = reports
            .iter()
            .flat_map(|r| {
                r.tasks.iter().map(|t| TableRow {
                    scheduler: r.scheduler.clone(),
                    task_id: t.task_id,
                    availability_rate: t.availability_rate,
                    mean_replay_window: t.mean_replay_window,
                    drop_count: r.drop_count,
                })
            })
            .collect();
        Self { reports, table }
    }

    /// Fixed-width text rendering of [`Comparison::table`].
    pub fn render_table(&self) -> String {
        let mut s = format!(
            "{:<9} {:>5} {:>12} {:>12} {:>8}\n",
            "scheduler", "task", "availability", "mean_window", "drops"
        );
        for r in &self.table {
            let window = r
                .mean_replay_window
                .map_or_else(|| "-".to_string(), |w| format!("{w:.1}"));
            s += &format!(
                "{:<9} {:>5} {:>12.3} {:>12} {:>8}\n",
                r.scheduler, r.task_id, r.availability_rate, window, r.drop_count
            );
        }
        s
    }
}

/// The three schedulers in a fixed order, keeping any custom configuration
/// the scenario gives for one of them.
fn contenders(sc: &ScenarioConfig) -> Vec<SchedulerChoice> {
    ["ecetes", "gfifo", "lfifo"]
        .into_iter()
        .map(|name| resolve_scheduler(sc, Some(name)).expect("known names"))
        .collect()
}

pub fn compare(scenario: &Path, out: &Path, stamp: bool) -> Result<Comparison, CliError> {
    let sc = load_scenario(scenario)?;
    let trace = trace_of(&sc, scenario)?;
    let results: Vec<Result<MetricsReport, SimError>> = std::thread::scope(|s| {
        let handles: Vec<_> = contenders(&sc)
            .into_iter()
            .map(|choice| {
                let sc = ScenarioConfig {
                    scheduler: choice,
                    ..sc.clone()
                };
                let trace = &trace;
                s.spawn(move || sample_crash_metrics(trace, &sc))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let reports = results
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| sim_err(e, scenario))?;
    let cmp = Comparison::from_reports(reports);
    write_json(Some(out), &cmp, stamp)?;
    Ok(cmp)
}

pub fn analyze(
    snapshot: &Path,
    tasks: &Path,
    cf_queue: QueueId,
    out: Option<&Path>,
) -> Result<AvailabilityReport, CliError> {
    let snap: LogSnapshot = read_json(snapshot)?;
    let metas: Vec<TaskMeta> = read_json(tasks)?;
    let report = usable_starting_points(&snap, &metas, cf_queue).map_err(|source| CliError::Snapshot {
        path: snapshot.to_path_buf(),
        source,
    })?;
    write_json(out, &report, false)?;
    Ok(report)
}
