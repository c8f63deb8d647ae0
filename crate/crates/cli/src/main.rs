//! `retainer`: analyze, size, route and simulate retainer pools from the shell.

mod analyze;
mod error;
mod optimize;
mod output;
mod route;
mod simulate;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use retainer_core::{CostVariant, Wage};

use error::{CliError, CliResult};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "retainer", version, about = "Retainer pool analysis for realtime crowdsourcing")]
struct Cli {
    /// Seed for simulations; overrides the seed in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format. Defaults to csv for `sweep` and table otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form metrics of one pool: loss, wait, busy/idle workers, costs.
    Analyze(analyze::AnalyzeArgs),
    /// Smallest pool meeting a miss or wait target, or the cheapest pool.
    Optimize(optimize::OptimizeArgs),
    /// Min-max intensity routing of worker groups to task types.
    Route(route::RouteArgs),
    /// Discrete-event simulation of a pool described by a config file.
    Simulate(simulate::SimulateArgs),
    /// Evaluate metrics over a parameter grid described by a spec file.
    Sweep(sweep::SweepArgs),
}

/// Retainer wage, in one of three units; converted to currency per second.
#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct WageArgs {
    /// Wage per idle retained worker per second.
    #[arg(long)]
    wage: Option<f64>,
    /// Wage per idle retained worker per minute.
    #[arg(long = "wage-per-min")]
    wage_per_min: Option<f64>,
    /// Wage per idle retained worker per hour.
    #[arg(long = "wage-per-hour")]
    wage_per_hour: Option<f64>,
}

impl WageArgs {
    pub fn per_second(&self) -> f64 {
        let wage = match (self.wage, self.wage_per_min, self.wage_per_hour) {
            (Some(s), _, _) => Wage::per_second(s),
            (_, Some(m), _) => Wage::per_minute(m),
            (_, _, Some(h)) => Wage::per_hour(h),
            _ => Wage::per_second(0.0),
        };
        wage.as_per_second()
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    /// Miss penalty per task added to the per-second wage bill.
    PerTask,
    /// Miss penalty weighted by the arrival rate.
    PerUnitTime,
}

impl From<VariantArg> for CostVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::PerTask => CostVariant::PerTask,
            VariantArg::PerUnitTime => CostVariant::PerUnitTime,
        }
    }
}

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    let text = match &cli.command {
        Command::Analyze(a) => analyze::run(a, cli.format.unwrap_or(Format::Table))?,
        Command::Optimize(a) => optimize::run(a, cli.format.unwrap_or(Format::Table))?,
        Command::Route(a) => route::run(a, cli.format.unwrap_or(Format::Table))?,
        Command::Simulate(a) => simulate::run(a, cli.seed, cli.format.unwrap_or(Format::Table))?,
        Command::Sweep(a) => sweep::run(a, cli.format.unwrap_or(Format::Csv))?,
    };
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not worth an error code
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
