//! `entropy-check`: warm-started per-symbol cost against the entropy rate
//! for each memory size in a schedule. The sanity check behind the whole
//! construction: with enough memory the coder should compress a source down
//! to its entropy.

use mauc_core::compression_to_entropy_check;

use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::report::{Cell, ResultRecord};

pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord, RunError> {
    cfg.validate_common().map_err(RunError::Usage)?;
    if cfg.m.is_empty() {
        return Err(RunError::Usage("at least one memory size is required".into()));
    }
    if cfg.entropy_rate.is_some() {
        return Err(RunError::Usage(
            "entropy-check derives the rate from the sampled parameter; \
             --entropy-rate does not apply"
                .into(),
        ));
    }
    let schedule: Vec<usize> = cfg.m.iter().map(|&m| m as usize).collect();
    let rows = compression_to_entropy_check(
        cfg.n as usize,
        cfg.k,
        cfg.order,
        &schedule,
        cfg.x_trials,
        cfg.seed,
    )?;

    let mut rec = ResultRecord::new(
        cfg.clone(),
        vec!["m", "per_symbol_bits", "entropy_rate", "gap"],
    );
    rec.note(
        "parameter",
        "one Jeffreys draw at (seed, trial 0); all rows score the same payload blocks",
    );
    for row in rows {
        rec.rows.push(vec![
            Cell::Uint(row.m),
            Cell::Float(row.per_symbol_bits),
            Cell::Float(row.entropy_rate),
            Cell::Float(row.per_symbol_bits - row.entropy_rate),
        ]);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::test_config;
    use crate::config::CommandKind;

    #[test]
    fn rows_mirror_the_library_table() {
        let mut cfg = test_config(CommandKind::EntropyCheck);
        cfg.m = vec![16, 128];
        cfg.order = 1;
        let rec = run(&cfg).unwrap();
        let direct = compression_to_entropy_check(64, 2, 1, &[16, 128], 2, 1).unwrap();
        assert_eq!(rec.rows.len(), 2);
        for (row, want) in rec.rows.iter().zip(&direct) {
            assert_eq!(row[0], Cell::Uint(want.m));
            assert_eq!(row[1], Cell::Float(want.per_symbol_bits));
            assert_eq!(
                row[3],
                Cell::Float(want.per_symbol_bits - want.entropy_rate)
            );
        }
    }

    #[test]
    fn assumed_rate_flag_is_rejected() {
        let mut cfg = test_config(CommandKind::EntropyCheck);
        cfg.entropy_rate = Some(0.5);
        assert!(matches!(run(&cfg), Err(RunError::Usage(_))));
    }
}
