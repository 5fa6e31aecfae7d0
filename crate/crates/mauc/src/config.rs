//! Resolved experiment descriptions.
//!
//! An [`ExperimentConfig`] captures everything a run's numbers depend on,
//! after defaults and environment fallbacks have been applied. It is echoed
//! into every output table so a result file can be regenerated from itself.
//! Knobs that cannot change the numbers (thread count, output path) are
//! deliberately not part of the config.

use serde::{Deserialize, Serialize};

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Bound,
    Simulate,
    Sweep,
    EntropyCheck,
    ReproducePaper,
    RoundtripFuzz,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Bound => "bound",
            CommandKind::Simulate => "simulate",
            CommandKind::Sweep => "sweep",
            CommandKind::EntropyCheck => "entropy-check",
            CommandKind::ReproducePaper => "reproduce-paper",
            CommandKind::RoundtripFuzz => "roundtrip-fuzz",
        }
    }
}

/// Serialization format for result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A fully resolved run description. Round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    /// Block length in symbols.
    pub n: u64,
    /// Memory sizes in symbols. Single entry unless the command sweeps.
    pub m: Vec<u64>,
    /// Alphabet size.
    pub k: usize,
    /// Source memory order (0 or 1).
    pub order: usize,
    /// Confidence parameter for the gain quantile.
    pub epsilon: f64,
    /// Parameter draws per Monte Carlo run.
    pub theta_trials: usize,
    /// Payload draws per parameter.
    pub x_trials: usize,
    /// Root seed; every stream in the run derives from it.
    pub seed: u64,
    pub format: OutputFormat,
    /// Assumed per-symbol entropy in bits; when absent, entropy is taken
    /// from a seeded parameter draw where a command needs it.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entropy_rate: Option<f64>,
    /// Bits per symbol used to reinterpret byte counts as symbol counts.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub symbol_width: Option<u32>,
    /// Shrink factor for the scaled empirical leg of `reproduce-paper`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale: Option<u64>,
    /// Round-trip count for `roundtrip-fuzz`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fuzz_trials: Option<u64>,
    /// When true, `roundtrip-fuzz` flips one payload bit per block and
    /// expects decoding to fail or mismatch.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub corrupt: Option<bool>,
}

impl ExperimentConfig {
    /// Checks the fields every command agrees on. Command-specific
    /// constraints (memory schedules, required knobs) live with the command.
    pub fn validate_common(&self) -> Result<(), String> {
        if self.k < 2 {
            return Err(format!("k must be at least 2, got {}", self.k));
        }
        if self.k > usize::from(u16::MAX) {
            return Err(format!("k must fit in 16 bits, got {}", self.k));
        }
        if self.order > 1 {
            return Err(format!("order must be 0 or 1, got {}", self.order));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if let Some(rate) = self.entropy_rate {
            let cap = (self.k as f64).log2();
            if !(rate >= 0.0 && rate <= cap) || !rate.is_finite() {
                return Err(format!(
                    "entropy rate must lie in [0, log2 k] = [0, {cap:.6}], got {rate}"
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentConfig {
        ExperimentConfig {
            command: CommandKind::Sweep,
            n: 512,
            m: vec![512, 4096, 65536],
            k: 2,
            order: 0,
            epsilon: 0.05,
            theta_trials: 200,
            x_trials: 20,
            seed: 2024,
            format: OutputFormat::Csv,
            entropy_rate: None,
            symbol_width: None,
            scale: None,
            fuzz_trials: None,
            corrupt: None,
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let cfg = sample();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn optional_fields_stay_out_of_the_echo() {
        let text = serde_json::to_string(&sample()).unwrap();
        assert!(!text.contains("symbol_width"));
        assert!(!text.contains("fuzz_trials"));
        assert!(text.contains("\"command\":\"sweep\""));
    }

    #[test]
    fn common_validation_rejects_bad_fields() {
        let mut cfg = sample();
        cfg.k = 1;
        assert!(cfg.validate_common().is_err());

        let mut cfg = sample();
        cfg.epsilon = 1.0;
        assert!(cfg.validate_common().is_err());

        let mut cfg = sample();
        cfg.order = 2;
        assert!(cfg.validate_common().is_err());

        let mut cfg = sample();
        cfg.entropy_rate = Some(1.5);
        assert!(cfg.validate_common().is_err(), "rate above log2 k for k=2");

        assert!(sample().validate_common().is_ok());
    }
}
