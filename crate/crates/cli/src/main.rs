use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Args, Parser, Subcommand};
use exactcount_cli::{
    cmd_run, cmd_sweep, resolve_run, resolve_sweep, run_checks, CheckKind, CliError, ConfigFile, Overrides,
};
use exactcount_core::{LevelSchedule, StopCondition};

#[derive(Parser)]
#[command(name = "exactcount", version, about = "Simulate exact population-size counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One simulation; prints a JSON summary line.
    Run(RunArgs),
    /// Many seeded runs over several n; writes a CSV.
    Sweep(SweepArgs),
    /// Oracle checks for the isolated building blocks.
    Check(CheckArgs),
}

#[derive(Args)]
struct Shared {
    /// JSON file with default settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    schedule: Option<LevelSchedule>,
    #[arg(long, value_parser = value_parser!(u32).range(1..))]
    max_phase: Option<u32>,
    /// correct, stable or interactions
    #[arg(long)]
    stop: Option<StopCondition>,
    /// Interaction budget; the run stops here even if the stop condition is unmet.
    #[arg(long)]
    max_interactions: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = value_parser!(u64).range(2..=u32::MAX as u64))]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write every count change as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated population sizes.
    #[arg(long, value_delimiter = ',', value_parser = value_parser!(u64).range(2..=u32::MAX as u64))]
    n_values: Option<Vec<u64>>,
    #[arg(long, value_parser = value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// Master seed; trial seeds are derived from it, n and the trial index.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum, default_value = "all")]
    which: CheckKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn overrides(shared: &Shared) -> Overrides {
    Overrides {
        schedule: shared.schedule,
        max_phase: shared.max_phase,
        stop: shared.stop,
        max_interactions: shared.max_interactions,
        ..Default::default()
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(a) => {
            let file = ConfigFile::load_opt(a.shared.config.as_deref())?;
            let flags = Overrides {
                n: a.n,
                seed: a.seed,
                trace: a.trace,
                ..overrides(&a.shared)
            };
            let (config, trace) = resolve_run(&file, &flags)?;
            let report = cmd_run(&config, trace.as_ref(), &mut io::stdout().lock())?;
            Ok(report.exit_code())
        }
        Command::Sweep(a) => {
            let file = ConfigFile::load_opt(a.shared.config.as_deref())?;
            let flags = Overrides {
                n_values: a.n_values,
                trials: a.trials,
                seed: a.seed,
                out: a.out,
                ..overrides(&a.shared)
            };
            let spec = resolve_sweep(&file, &flags)?;
            let rows = cmd_sweep(&spec)?;
            let bad = rows.iter().filter(|r| !r.correct).count();
            eprintln!("sweep: wrote {} rows to {}", rows.len(), spec.output_path.display());
            Ok(if bad == 0 { 0 } else { 1 })
        }
        Command::Check(a) => {
            let results = run_checks(a.which, a.seed);
            for r in &results {
                println!("{r}");
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
