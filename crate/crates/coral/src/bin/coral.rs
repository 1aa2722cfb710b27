//! Command-line front end for the tuning harness.
//!
//! Exit codes: 0 = ran and produced a feasible result (or wrote the
//! requested artifact), 2 = ran to completion but the result is
//! infeasible, 1 = error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coral::device::MeasurementProtocol;
use coral::harness::{cmd_compare, cmd_profile, cmd_tradeoff, cmd_tune, BackendChoice, Method};

#[derive(Parser)]
#[command(name = "coral", about = "Throughput-power co-optimization for edge inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure every grid configuration and write a profile CSV.
    Profile(ProfileArgs),
    /// Run the online tuner for a scenario; write result and trace as JSON.
    Tune(TuneArgs),
    /// Run several methods on one scenario and emit a comparison report.
    Compare(CompareArgs),
    /// Emit power/throughput scatter rows with Pareto-frontier flags.
    Tradeoff(TradeoffArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Device spec: a TOML file path, or builtin:xavier-nx / builtin:orin-nano.
    #[arg(long)]
    spec: String,
    /// Backend: `synthetic`, `synthetic:<params-file>`, or `table:<path>`.
    #[arg(long, default_value = "synthetic")]
    backend: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Output profile CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Sleep for real measurement seconds instead of simulating them.
    #[arg(long)]
    realtime: bool,
}

#[derive(Args)]
struct TuneArgs {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSON path (result plus full per-iteration trace).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated: coral, oracle, randomN, max_power, default.
    #[arg(long, value_delimiter = ',', default_value = "coral,oracle,random10,max_power,default")]
    methods: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output report CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Input: `table:<profile.csv>`.
    #[arg(long)]
    backend: String,
    /// Output scatter CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Profile(args) => {
            let backend = BackendChoice::parse(&args.backend)?;
            let protocol = MeasurementProtocol { realtime: args.realtime, ..Default::default() };
            cmd_profile(&args.spec, &backend, args.seed, &protocol, &args.out)?;
            eprintln!("wrote {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Tune(args) => {
            let output = cmd_tune(&args.scenario, args.seed, args.out.as_deref())?;
            let r = &output.result;
            match &r.best_sample {
                Some(s) => eprintln!(
                    "best: {s} feasible={} efficiency={:.6} fps/mW",
                    r.feasible, r.efficiency
                ),
                None => eprintln!("every evaluation failed on hardware; best attempt {}", r.best_config),
            }
            Ok(if r.feasible { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Compare(args) => {
            let methods: Vec<Method> = args
                .methods
                .iter()
                .map(|m| Method::parse(m))
                .collect::<Result<_, _>>()?;
            let report = cmd_compare(&args.scenario, &methods, args.seed, args.out.as_deref())?;
            print!("{}", report.render_table());
            Ok(ExitCode::SUCCESS)
        }
        Command::Tradeoff(args) => {
            let path = match args.backend.split_once(':') {
                Some(("table", p)) => PathBuf::from(p),
                _ => anyhow::bail!("tradeoff input must be `table:<profile.csv>`"),
            };
            cmd_tradeoff(&path, &args.out)?;
            eprintln!("wrote {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
