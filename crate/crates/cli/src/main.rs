mod args;
mod commands;
mod settings;

use std::process::ExitCode;

use clap::Parser;
use nlse_istm::{Error, Result};

use args::{Cli, Command, RunArgs};
use settings::Settings;

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NFT_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Configuration(format!("NFT_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Configuration(e.to_string()))
}

fn init_logging(level: &str) -> Result<()> {
    let filter: log::LevelFilter = level
        .parse()
        .map_err(|_| Error::Configuration(format!("unknown log level '{level}'")))?;
    let _ = env_logger::Builder::new().filter_level(filter).format_target(false).try_init();
    Ok(())
}

fn settings(run: &RunArgs) -> Result<Settings> {
    let s = Settings::resolve(run)?;
    init_logging(&s.log_level)?;
    Ok(s)
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Direct(run) => commands::direct(&settings(&run)?),
        Command::Evolve { input, run } => commands::evolve_file(&input, &settings(&run)?),
        Command::Invert { input, run } => commands::invert_file(&input, &settings(&run)?),
        Command::Solve(run) => commands::solve(&settings(&run)?),
        Command::Validate { example, run } => commands::validate(example, &settings(&run)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
