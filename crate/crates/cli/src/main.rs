use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rtrlog::{CliError, RunArgs};

/// Compare replay-log eviction schedulers on synthetic task sets.
#[derive(Parser)]
#[command(name = "rtrlog", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the scenario's event trace.
    GenTrace {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one scheduler over the scenario and write its metrics report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// ecetes, gfifo or lfifo; defaults to the scenario's scheduler.
        #[arg(long)]
        scheduler: Option<String>,
        /// Add a wall-clock `stamp` key to the report.
        #[arg(long)]
        stamp: bool,
        /// Also write the snapshot taken at the last crash instant.
        #[arg(long)]
        snapshot_out: Option<PathBuf>,
    },
    /// Run all three schedulers on the same trace.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stamp: bool,
    },
    /// Report usable starting points in a stored snapshot.
    Analyze {
        #[arg(long)]
        snapshot: PathBuf,
        /// JSON list of {task_id, checkpoint_bytes}.
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long, default_value_t = 0)]
        cf_queue: usize,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::GenTrace { scenario, out } => rtrlog::gen_trace(&scenario, &out),
        Command::Run {
            scenario,
            out,
            scheduler,
            stamp,
            snapshot_out,
        } => rtrlog::run(&RunArgs {
            scenario: &scenario,
            out: out.as_deref(),
            scheduler: scheduler.as_deref(),
            stamp,
            snapshot_out: snapshot_out.as_deref(),
        })
        .map(drop),
        Command::Compare { scenario, out, stamp } => {
            let cmp = rtrlog::compare(&scenario, &out, stamp)?;
            print!("{}", cmp.render_table());
            Ok(())
        }
        Command::Analyze {
            snapshot,
            tasks,
            cf_queue,
            out,
        } => rtrlog::analyze(&snapshot, &tasks, cf_queue, out.as_deref()).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rtrlog: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
