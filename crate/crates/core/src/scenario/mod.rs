//! Scenario files: parsing, sweep expansion, parallel runs and CSV output.
//!
//! The bundled figure scenarios live in `scenarios/` next to the crate
//! manifest.

mod config;
mod run;

use std::path::PathBuf;

pub use config::{
    parse_config, serialize_config, ConfigError, InitialSpec, ParamsSpec, PulseSpec, RunPoint, ScenarioConfig,
    ScenarioKind, ScheduleKind, ScheduleSpec, SweepAxis, SweepMode, SweepSpec,
};
pub use run::{resolve, run_scenario, validate_scenario, RunArtifacts, RunInputs, RunSummary};

use crate::csv::fmt_f64;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric error in run {index} ({point}): {source}")]
    Numeric {
        index: usize,
        point: String,
        #[source]
        source: crate::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl ScenarioError {
    /// 1 for configuration and output problems, 2 for failures inside a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => 1,
            Self::Numeric { .. } => 2,
        }
    }
}

/// One line per run, e.g. `run 002 kappa1=0.2 F_numeric=0.97 ...`.
pub fn summary_lines(artifacts: &RunArtifacts) -> Vec<String> {
    artifacts
        .runs
        .iter()
        .map(|run| {
            let mut line = format!("run {:03}", run.index);
            for (k, v) in &run.labels {
                line.push_str(&format!(" {k}={}", fmt_f64(*v)));
            }
            for (k, v) in &run.values {
                let v = v.map(fmt_f64).unwrap_or_else(|| "-".to_string());
                line.push_str(&format!(" {k}={v}"));
            }
            line
        })
        .collect()
}

/// Prints the summary lines to stdout, or the error to stderr, and returns
/// the process exit code.
pub fn emit_summary(outcome: &Result<RunArtifacts, ScenarioError>) -> i32 {
    match outcome {
        Ok(artifacts) => {
            for line in summary_lines(artifacts) {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
