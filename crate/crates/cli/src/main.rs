use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cqed_cli::acceptance;
use cqed_cli::{CliError, CliResult, CommandKind, Config, RunContext};

#[derive(Parser, Debug)]
#[command(name = "cqed", version, about = "Parametric dispersive-shift sweeps for a two-transmon cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true, conflicts_with = "paper_defaults")]
    config: Option<PathBuf>,
    /// Output directory for CSV and plot files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for the randomized checks of the acceptance suite.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Use the bundled device configuration.
    #[arg(long, global = true)]
    paper_defaults: bool,
    /// Also write SVG plots next to the CSV files.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Cavity response maps versus pump and probe frequency.
    Spectrum,
    /// Parametric shift versus pump detuning for an amplitude ladder.
    ChiSweep,
    /// Frequencies, static couplings and shifts versus flux.
    Fluxmap,
    /// Photon-shot-noise dephasing and Ramsey times.
    Dephasing,
    /// Pump-amplitude correction across pump frequency.
    Calibrate,
    /// Compare series, diagonalization and Floquet shifts.
    FloquetCheck,
    /// Run every acceptance criterion and print one line each.
    Acceptance,
}

fn context(cli: &Cli) -> CliResult<RunContext> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => {
            if !cli.paper_defaults {
                log::info!("no --config given, using the bundled defaults");
            }
            Config::paper_defaults()
        }
    };
    let jobs = match cli.jobs {
        Some(0) => return Err(CliError::config("--jobs", "must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    RunContext::new(config, cli.out.clone(), jobs, cli.seed, cli.plot)
}

fn execute(cli: &Cli) -> CliResult<()> {
    let ctx = context(cli)?;
    let kind = match cli.command {
        Command::Spectrum => CommandKind::Spectrum,
        Command::ChiSweep => CommandKind::ChiSweep,
        Command::Fluxmap => CommandKind::Fluxmap,
        Command::Dephasing => CommandKind::Dephasing,
        Command::Calibrate => CommandKind::Calibrate,
        Command::FloquetCheck => CommandKind::FloquetCheck,
        Command::Acceptance => {
            let results = acceptance::run_all(&ctx);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            return if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Tolerance(format!("{failed} acceptance criteria failed")))
            };
        }
    };
    for path in cqed_cli::run(kind, &ctx)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
