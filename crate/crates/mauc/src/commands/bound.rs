//! `bound`: evaluate the closed-form gain lower bound, one row per memory
//! size. No simulation; everything is analytic given H_n.

use mauc_core::{gain_lower_bound, minimax_redundancy_closed_form, BoundInputs};

use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::report::{Cell, ResultRecord};

pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord, RunError> {
    cfg.validate_common().map_err(RunError::Usage)?;
    if cfg.m.is_empty() {
        return Err(RunError::Usage("at least one memory size is required".into()));
    }
    let d = super::dimension(cfg.k, cfg.order);
    let r_bar_n = minimax_redundancy_closed_form(cfg.n, cfg.k, cfg.order)?;
    let (h_n, h_source) = super::block_entropy(cfg)?;

    let mut rec = ResultRecord::new(
        cfg.clone(),
        vec!["n", "m", "d", "epsilon", "h_n", "r_bar_n", "r_hat", "log2_epsilon", "bound"],
    );
    rec.note("h_n_source", h_source);
    rec.note("r_bar_n_estimator", "second-order asymptotic, residual ignored");
    for &m in &cfg.m {
        let inputs = BoundInputs::new(cfg.n, m, d, cfg.epsilon, h_n, r_bar_n)?;
        let b = gain_lower_bound(&inputs);
        rec.rows.push(vec![
            Cell::Uint(cfg.n),
            Cell::Uint(m),
            Cell::Uint(d),
            Cell::Float(cfg.epsilon),
            Cell::Float(b.h_n),
            Cell::Float(b.r_bar_n),
            Cell::Float(b.r_hat),
            Cell::Float(b.log2_epsilon),
            Cell::Float(b.value),
        ]);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::test_config;
    use crate::config::CommandKind;
    use crate::error::RunError;

    fn config() -> ExperimentConfig {
        let mut cfg = test_config(CommandKind::Bound);
        cfg.n = 512;
        cfg.epsilon = 0.05;
        cfg.entropy_rate = Some(0.5);
        cfg
    }

    #[test]
    fn rows_match_the_direct_composition() {
        let cfg = config();
        let rec = run(&cfg).unwrap();
        let r_bar_n = minimax_redundancy_closed_form(512, 2, 0).unwrap();
        let b = gain_lower_bound(
            &BoundInputs::new(512, 256, 1, 0.05, 256.0, r_bar_n).unwrap(),
        );
        assert_eq!(rec.rows.len(), 1);
        assert_eq!(rec.rows[0][8], Cell::Float(b.value));
        assert_eq!(rec.rows[0][6], Cell::Float(b.r_hat));
    }

    #[test]
    fn bound_column_is_nondecreasing_over_doubling_memory() {
        let mut cfg = config();
        cfg.m = (10..=23).map(|p| 1u64 << p).collect();
        let rec = run(&cfg).unwrap();
        let bounds: Vec<f64> = rec
            .rows
            .iter()
            .map(|row| match row[8] {
                Cell::Float(v) => v,
                _ => panic!("bound column must be numeric"),
            })
            .collect();
        assert!(bounds.windows(2).all(|w| w[1] >= w[0]), "{bounds:?}");
    }

    #[test]
    fn zero_memory_is_a_usage_error() {
        let mut cfg = config();
        cfg.m = vec![0];
        assert!(matches!(run(&cfg), Err(RunError::Usage(_))));
    }
}
