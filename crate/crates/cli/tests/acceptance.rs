//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rtrlog_core::sim::{generate_trace, sample_crash_metrics, sample_snapshots, ScenarioConfig, SchedulerChoice};
use rtrlog_core::{usable_starting_points, Ecetes, EvictionScheduler};
use rtrlog_reference::{
    chatty_quiet, check_analyzer, check_guarantee, check_scenario, guarantee_scenario, random_scenario,
    random_snapshot, scenario_with, Checks,
};
use serde_json::Value;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

/// Runs `check`, failing it also when it exceeds `budget`.
fn criterion(name: &str, budget: Option<Duration>, check: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = check();
    let took = start.elapsed();
    let in_time = budget.is_none_or(|b| took < b);
    let ok = v.ok && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
    println!(
        "{} {name}: {} [{:.2}s{budget_note}]",
        if ok { "PASS" } else { "FAIL" },
        v.detail,
        took.as_secs_f64()
    );
    ok
}

fn oracle_equivalence() -> Verdict {
    let checks = Checks {
        snapshot_every: 1000,
        invariants: false,
    };
    let mut mismatches = Vec::new();
    let mut accepted = 0;
    for seed in 0..200u64 {
        match check_scenario(&random_scenario(0xACCE_0000 + seed, 10_000), checks) {
            Ok(n) => accepted += n.iter().sum::<usize>(),
            Err(e) => mismatches.push(format!("seed {seed}: {e}")),
        }
    }
    verdict(
        mismatches.is_empty(),
        format!(
            "200 scenarios x 10^4 inserts x 3 schedulers, {accepted} accepted, {} mismatches{}",
            mismatches.len(),
            mismatches.first().map_or(String::new(), |m| format!(" (first: {m})"))
        ),
    )
}

fn max_steps(seed: u64, records: usize, inserts: usize) -> u64 {
    let s = scenario_with(seed, 4, 4, records, inserts);
    let mut e = Ecetes::new(s.pool, &s.queues).expect("valid config");
    s.entries
        .iter()
        .map(|x| e.insert_entry(x).expect("valid entry").steps)
        .max()
        .unwrap_or(0)
}

fn bounded_steps() -> Verdict {
    let runs = [(64, 100), (64, 100_000), (4096, 100), (4096, 100_000)];
    let maxima: Vec<u64> = runs.iter().map(|&(records, n)| max_steps(11, records, n)).collect();
    let ok = maxima.windows(2).all(|w| w[0] == w[1]);
    let detail = runs
        .iter()
        .zip(&maxima)
        .map(|((r, n), m)| format!("pool {r}/{n} inserts -> {m}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(ok, format!("Q=4 L_max=4 max steps: {detail}"))
}

fn invariant_fuzz() -> Verdict {
    let checks = Checks {
        snapshot_every: 0,
        invariants: true,
    };
    let mut ops = 0;
    let mut violations = Vec::new();
    let mut seed = 0xF022_0000u64;
    while ops < 100_000 {
        let s = random_scenario(seed, 1_000);
        ops += 3 * s.entries.len();
        if let Err(e) = check_scenario(&s, checks) {
            violations.push(format!("seed {seed:#x}: {e}"));
        }
        seed += 1;
    }
    verdict(
        violations.is_empty(),
        format!(
            "{ops} inserts over 3 schedulers, {} violations{}",
            violations.len(),
            violations.first().map_or(String::new(), |m| format!(" (first: {m})"))
        ),
    )
}

fn quiet_task_availability() -> Verdict {
    let base = chatty_quiet();
    let quiet = 1;
    let trace = generate_trace(&base.tasks, base.duration, base.seed).expect("valid scenario");
    let mut per_instant = Vec::new();
    let mut rates = Vec::new();
    for choice in [SchedulerChoice::Gfifo, SchedulerChoice::default()] {
        let sc = ScenarioConfig {
            scheduler: choice,
            ..base.clone()
        };
        let run = sample_snapshots(&trace, &sc).expect("scenario runs");
        let cf = run.roles.control_flow_queue().expect("control-flow queue");
        let counts: Vec<usize> = run
            .snapshots
            .iter()
            .map(|s| {
                usable_starting_points(s, &sc.task_metas(), cf)
                    .expect("analyzable")
                    .tasks[quiet]
                    .usable_count()
            })
            .collect();
        per_instant.push(counts);
        rates.push(sample_crash_metrics(&trace, &sc).expect("scenario runs").tasks[quiet].availability_rate);
    }
    let instants = per_instant[0].len();
    let ok = rates[0] == 0.0
        && rates[1] == 1.0
        && per_instant[0].iter().all(|&n| n == 0)
        && per_instant[1].iter().all(|&n| n >= 1);
    verdict(
        ok,
        format!(
            "quiet-task availability gfifo {:?} ecetes {:?} over {instants} instants after warmup",
            rates[0], rates[1]
        ),
    )
}

fn guarantee() -> Verdict {
    let mut counterexamples = Vec::new();
    let (mut instants, mut pressured) = (0, 0);
    for seed in 0..50 {
        match check_guarantee(&guarantee_scenario(seed)) {
            Ok(s) => {
                instants += s.instants_checked;
                pressured += s.control_flow_evicted as usize;
            }
            Err(e) => counterexamples.push(format!("seed {seed}: {e}")),
        }
    }
    verdict(
        counterexamples.is_empty(),
        format!(
            "50 scenarios, {instants} instants checked, control flow evicted in {pressured}, {} counterexamples{}",
            counterexamples.len(),
            counterexamples
                .first()
                .map_or(String::new(), |m| format!(" (first: {m})"))
        ),
    )
}

fn compare_harness() -> Verdict {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::TempDir::new().expect("temp dir");
    let mut problems = Vec::new();
    for name in ["high_sporadicity", "multi_starting_point"] {
        let scenario = root.join(format!("scenarios/{name}.json"));
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{name}.{run}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_rtrlog"))
                .args(["compare", "--scenario"])
                .arg(&scenario)
                .arg("--out")
                .arg(&out)
                .output()
                .expect("binary runs")
                .status;
            if !status.success() {
                problems.push(format!("{name}: exit {status}"));
            }
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        if outputs[0] != outputs[1] {
            problems.push(format!("{name}: runs differ"));
        }
        let golden =
            std::fs::read_to_string(root.join(format!("tests/golden/{name}.compare.json"))).unwrap_or_default();
        let parsed: Option<(Value, Value)> = serde_json::from_slice(&outputs[0])
            .ok()
            .zip(serde_json::from_str(&golden).ok());
        match parsed {
            Some((got, want)) if got == want => {
                let rows = got["table"].as_array().map_or(0, Vec::len);
                let tasks = got["reports"][0]["tasks"].as_array().map_or(0, Vec::len);
                if rows != 3 * tasks || rows == 0 {
                    problems.push(format!("{name}: table has {rows} rows for {tasks} tasks"));
                }
            }
            _ => problems.push(format!("{name}: differs from golden")),
        }
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            "2 scenarios x 2 runs byte-identical and equal to goldens, availability per scheduler and task".to_string()
        } else {
            problems.join("; ")
        },
    )
}

fn analyzer_oracle() -> Verdict {
    let mismatches: Vec<String> = (0..1000u64)
        .filter_map(|seed| {
            check_analyzer(&random_snapshot(0xA11A_0000 + seed))
                .err()
                .map(|e| format!("seed {seed}: {e}"))
        })
        .collect();
    verdict(
        mismatches.is_empty(),
        format!(
            "1000 snapshots, {} mismatches{}",
            mismatches.len(),
            mismatches.first().map_or(String::new(), |m| format!(" (first: {m})"))
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        criterion("oracle-equivalence", Some(secs(30)), oracle_equivalence),
        criterion("bounded-step", Some(secs(10)), bounded_steps),
        criterion("invariant-fuzz", Some(secs(30)), invariant_fuzz),
        criterion("gfifo-essential-record-loss", Some(secs(5)), quiet_task_availability),
        criterion("starting-point-guarantee", None, guarantee),
        criterion("compare-harness", Some(secs(10)), compare_harness),
        criterion("analyzer-oracle", None, analyzer_oracle),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
