//! Scenario runner for `biform-core`: configuration, scenario registry and report encodings.

pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;

use std::thread;

pub use config::{Format, Mode, RunConfig};
pub use error::CliError;
pub use report::{emit, Report, ScenarioReport};
pub use scenarios::{run_scenario, SCENARIOS};

/// Runs every selected scenario, concurrently when `parallel` is set. Records come back in
/// the requested order either way.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let names = config.selected();
    let scenarios = if config.parallel {
        thread::scope(|s| {
            let handles: Vec<_> = names.iter().map(|n| s.spawn(move || run_scenario(n, config))).collect();
            handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect::<Result<Vec<_>, _>>()
        })?
    } else {
        names.iter().map(|n| run_scenario(n, config)).collect::<Result<Vec<_>, _>>()?
    };
    Ok(Report { config: config.clone(), scenarios })
}
