//! One module per subcommand, plus the pieces they share.

pub mod bound;
pub mod entropy;
pub mod fuzz;
pub mod reproduce;
pub mod simulate;
pub mod sweep;

use mauc_core::{entropy_rate, sample_jeffreys, trial_rng, Role};

use crate::config::ExperimentConfig;
use crate::error::RunError;

/// Free parameters of the order-r family over k symbols: k^r (k - 1).
pub(crate) fn dimension(k: usize, order: usize) -> u64 {
    (k as u64).pow(order as u32) * (k as u64 - 1)
}

/// Block entropy H_n in bits: n times the assumed rate when one was given,
/// else n times the entropy rate of the seeded parameter draw at trial 0.
pub(crate) fn block_entropy(cfg: &ExperimentConfig) -> Result<(f64, &'static str), RunError> {
    match cfg.entropy_rate {
        Some(rate) => Ok((rate * cfg.n as f64, "assumed rate from --entropy-rate")),
        None => {
            let mut rng = trial_rng(cfg.seed, 0, Role::Parameter);
            let theta = sample_jeffreys(cfg.k, cfg.order, &mut rng)?;
            Ok((
                entropy_rate(&theta)? * cfg.n as f64,
                "entropy rate of the parameter draw at (seed, trial 0)",
            ))
        }
    }
}

/// The single memory size of a non-sweeping command.
pub(crate) fn single_m(cfg: &ExperimentConfig) -> Result<u64, RunError> {
    match cfg.m.as_slice() {
        [m] => Ok(*m),
        other => Err(RunError::Usage(format!(
            "{} takes exactly one memory size, got {}",
            cfg.command.name(),
            other.len()
        ))),
    }
}

/// A small, fast config every command test starts from.
#[cfg(test)]
pub(crate) fn test_config(command: crate::config::CommandKind) -> ExperimentConfig {
    ExperimentConfig {
        command,
        n: 64,
        m: vec![256],
        k: 2,
        order: 0,
        epsilon: 0.5,
        theta_trials: 10,
        x_trials: 2,
        seed: 1,
        format: crate::config::OutputFormat::Csv,
        entropy_rate: None,
        symbol_width: None,
        scale: None,
        fuzz_trials: None,
        corrupt: None,
    }
}
