//! Experiment harness for the memory-assisted universal coder.
//!
//! The library side exists so that a result file can be regenerated
//! programmatically: [`run_config`] takes the config echoed into every
//! output table and produces the same table again. The binary is a thin
//! argument-parsing layer over it.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::time::Instant;

pub use config::{CommandKind, ExperimentConfig, OutputFormat};
pub use error::RunError;
pub use report::{Cell, ResultRecord};

/// A completed run. `gate_failure` is set when the run produced its table
/// but a correctness gate tripped (fuzz failures): the table should still
/// be written, and the process should still exit nonzero.
pub struct RunOutcome {
    pub record: ResultRecord,
    pub gate_failure: Option<RunError>,
}

/// Runs the experiment a config describes. Pure in everything except time:
/// the same config yields the same table at any thread count.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let (mut record, gate_failure) = match cfg.command {
        CommandKind::Bound => (commands::bound::run(cfg)?, None),
        CommandKind::Simulate => (commands::simulate::run(cfg)?, None),
        CommandKind::Sweep => (commands::sweep::run(cfg)?, None),
        CommandKind::EntropyCheck => (commands::entropy::run(cfg)?, None),
        CommandKind::ReproducePaper => (commands::reproduce::run(cfg)?, None),
        CommandKind::RoundtripFuzz => {
            let (record, failure) = commands::fuzz::run(cfg)?;
            (record, failure.map(RunError::Fuzz))
        }
    };
    record.validate().map_err(RunError::Numeric)?;
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutcome {
        record,
        gate_failure,
    })
}
