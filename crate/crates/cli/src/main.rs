mod commands;
mod config;
mod manifest;
mod table;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes shared by every subcommand.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "granular",
    about = "Cooling granular gases: particle runs, moment bounds and cooling-law analysis",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct GlobalArgs {
    /// Override the RNG seed from the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format for report tables.
    #[arg(long, global = true, value_parser = ["table", "csv"], default_value = "table")]
    pub format: String,
    /// Exit nonzero when any printed verdict fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Directory for emitted files (default: current directory).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one particle simulation from a config file and write its CSV.
    Run(commands::run::RunArgs),
    /// Print the weak-inelasticity thresholds.
    Thresholds(commands::thresholds::ThresholdArgs),
    /// Sweep the moment-entropy inequalities over analytic families.
    Inequalities(commands::inequalities::InequalityArgs),
    /// Fit a decay exponent to a recorded CSV.
    Fit(commands::fit::FitArgs),
    /// Check a restitution model against the standing assumptions.
    ValidateModel(commands::validate_model::ValidateArgs),
    /// Run the experiment matrix and write per-run CSVs plus a summary.
    Report(commands::report::ReportArgs),
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => commands::run::execute(&cli.global, &args),
        Command::Thresholds(args) => commands::thresholds::execute(&cli.global, &args),
        Command::Inequalities(args) => commands::inequalities::execute(&cli.global, &args),
        Command::Fit(args) => commands::fit::execute(&cli.global, &args),
        Command::ValidateModel(args) => commands::validate_model::execute(&cli.global, &args),
        Command::Report(args) => commands::report::execute(&cli.global, &args),
    };
    ExitCode::from(code)
}
