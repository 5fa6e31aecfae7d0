//! `sweep`: empirical gain and bound across a memory schedule.
//!
//! Every row reuses the same parameter and payload draws, and each memory
//! is a prefix of the longest one, so differences down the m column are
//! attributable to m alone. At m = 0 the gain is measurable but the
//! surcharge formula is not defined, so the bound cells stay empty.

use mauc_core::{
    empirical_gain, gain_lower_bound, minimax_redundancy_closed_form, prior_mean_entropy,
    BoundInputs, GainRun,
};

use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::report::{Cell, ResultRecord};

pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord, RunError> {
    cfg.validate_common().map_err(RunError::Usage)?;
    if cfg.m.is_empty() {
        return Err(RunError::Usage("at least one memory size is required".into()));
    }
    if cfg.m.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RunError::Usage(
            "memory sizes must be strictly increasing".into(),
        ));
    }
    let d = super::dimension(cfg.k, cfg.order);
    let r_bar_n = minimax_redundancy_closed_form(cfg.n, cfg.k, cfg.order)?;
    let (h_mean, h_se) =
        prior_mean_entropy(cfg.n as usize, cfg.k, cfg.order, cfg.theta_trials, cfg.seed)?;

    let mut rec = ResultRecord::new(
        cfg.clone(),
        vec!["m", "g_empirical", "bound", "g_minus_bound", "r_hat", "r_bar_n", "h_n_mean"],
    );
    rec.note(
        "pairing",
        "rows share parameter and payload draws; memories are nested prefixes",
    );
    rec.note("bound_entropy", "prior-mean block entropy over the shared draws");
    rec.note("h_n_prior_mean_se", format!("{h_se:.6e}"));

    for &m in &cfg.m {
        let est = empirical_gain(&GainRun {
            n: cfg.n as usize,
            m: m as usize,
            k: cfg.k,
            order: cfg.order,
            epsilon: cfg.epsilon,
            theta_trials: cfg.theta_trials,
            x_trials: cfg.x_trials,
            seed: cfg.seed,
        })?;
        let row = if m == 0 {
            vec![
                Cell::Uint(m),
                Cell::Float(est.g_empirical),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Float(r_bar_n),
                Cell::Float(h_mean),
            ]
        } else {
            let inputs = BoundInputs::new(cfg.n, m, d, cfg.epsilon, h_mean, r_bar_n)?;
            let b = gain_lower_bound(&inputs);
            vec![
                Cell::Uint(m),
                Cell::Float(est.g_empirical),
                Cell::Float(b.value),
                Cell::Float(est.g_empirical - b.value),
                Cell::Float(b.r_hat),
                Cell::Float(b.r_bar_n),
                Cell::Float(b.h_n),
            ]
        };
        rec.rows.push(row);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::test_config;
    use crate::config::CommandKind;

    #[test]
    fn zero_memory_row_has_no_bound() {
        let mut cfg = test_config(CommandKind::Sweep);
        cfg.m = vec![0, 64];
        let rec = run(&cfg).unwrap();
        assert_eq!(rec.rows[0][2], Cell::Empty);
        assert!(matches!(rec.rows[0][1], Cell::Float(_)));
        assert!(matches!(rec.rows[1][2], Cell::Float(_)));
    }

    #[test]
    fn schedule_must_increase() {
        let mut cfg = test_config(CommandKind::Sweep);
        cfg.m = vec![64, 64];
        assert!(matches!(run(&cfg), Err(RunError::Usage(_))));
    }
}
