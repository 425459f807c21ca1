use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optomech::scenario::{emit_summary, parse_config, run_scenario, validate_scenario, ScenarioConfig};

/// Runs optomechanical conversion and transmission scenarios.
///
/// Exit codes: 0 on success, 1 on configuration or output errors, 2 on
/// numeric failures inside a run.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV artifacts.
    Run {
        config: PathBuf,
        /// Directory the `[output] path` stem is resolved against.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for sweep points; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse a scenario file and check every sweep point without running.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out, jobs } => load(&config).map(|c| run_scenario(&c, &out, jobs)),
        Command::Validate { config } => {
            let checked = load(&config).and_then(|c| {
                let plan = validate_scenario(&c).map_err(|e| format!("{}: {e}", config.display()))?;
                Ok((c.kind.name(), plan.len()))
            });
            return match checked {
                Ok((kind, runs)) => {
                    println!("{}: valid {kind} scenario, {runs} run(s)", config.display());
                    ExitCode::SUCCESS
                }
                Err(message) => {
                    eprintln!("error: {message}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let code = match outcome {
        Ok(result) => emit_summary(&result),
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    };
    ExitCode::from(code as u8)
}
