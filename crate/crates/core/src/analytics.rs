//! Gain analytics: closed-form redundancy and gain-bound evaluation, and the
//! Monte Carlo estimators they are validated against.
//!
//! All logarithms are base 2 and all lengths are in bits, including the
//! log(epsilon) term of the gain bound.  The parameter prior is Jeffreys'
//! (symmetric Dirichlet(1/2) per state row), which is asymptotically least
//! favorable, so prior-averaged redundancy stands in for the minimax value.

use rayon::prelude::*;

use crate::coder::{ideal_length, ContextCounts};
use crate::error::{Error, Result};
use crate::seeding::{trial_rng, Role};
use crate::source::{entropy_rate, generate, sample_jeffreys, MarkovParameter, SymbolSequence};

/// Redundancy surcharge for coding with counts learned from an m-symbol
/// memory instead of the true parameter: `(d/2) log2(1 + n/m) + 2`.
/// Strictly decreasing in m, strictly increasing in n and d, limit 2 as
/// m grows.
pub fn hat_r(n: u64, m: u64, d: u64) -> Result<f64> {
    if n < 1 || m < 1 || d < 1 {
        return Err(Error::InvalidParameter(format!(
            "hat_r requires n, m, d >= 1, got n={n}, m={m}, d={d}"
        )));
    }
    Ok(d as f64 / 2.0 * (1.0 + n as f64 / m as f64).log2() + 2.0)
}

/// ln Gamma(h/2) for integer h >= 1, by upward recursion from Gamma(1/2) =
/// sqrt(pi) and Gamma(1) = 1.
fn ln_gamma_half(h: u64) -> f64 {
    let (mut z, mut acc) = if h % 2 == 1 {
        (0.5, 0.5 * std::f64::consts::PI.ln())
    } else {
        (1.0, 0.0)
    };
    while 2.0 * z < h as f64 {
        acc += z.ln();
        z += 1.0;
    }
    acc
}

/// Average minimax redundancy of length-n blocks over the order-r family,
/// by the Clarke-Barron asymptotic
/// `(d/2) log2(n/(2 pi e)) + log2(pi^(k/2) / Gamma(k/2))` per multinomial
/// block with d = k - 1.  Order 1 sums k such blocks with per-state count
/// n/k (uniform occupancy; the redundancy is a prior average, so no single
/// stationary law applies).  Clamped below at 0, where the asymptotic is
/// meaningless anyway.
pub fn minimax_redundancy_closed_form(n: u64, k: usize, r: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "redundancy asymptotic requires n >= 2, got {n}"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {k}"
        )));
    }
    if r > 1 {
        return Err(Error::InvalidParameter(format!(
            "only orders 0 and 1 are supported, got {r}"
        )));
    }
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    let jeffreys_const =
        k as f64 / 2.0 * std::f64::consts::PI.log2() - ln_gamma_half(k as u64) / std::f64::consts::LN_2;
    let block = |count: f64| (k as f64 - 1.0) / 2.0 * (count / two_pi_e).log2() + jeffreys_const;
    let value = match r {
        0 => block(n as f64),
        _ => k as f64 * block(n as f64 / k as f64),
    };
    Ok(value.max(0.0))
}

/// Monte Carlo oracle for the average redundancy: draws theta from Jeffreys,
/// a block x from theta, and accumulates
/// `ideal_length(x, zero) - n * entropy_rate(theta)`.
/// Returns (mean, standard error).  Deterministic given the seed at any
/// thread count.
pub fn minimax_redundancy_monte_carlo(
    n: usize,
    k: usize,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::InvalidParameter(format!(
            "standard error needs at least 2 trials, got {trials}"
        )));
    }
    let zero = ContextCounts::zero(k, r)?;
    let redundancies: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let theta = sample_jeffreys(k, r, &mut trial_rng(seed, t, Role::Parameter))?;
            let x = generate(&theta, n, &mut trial_rng(seed, t, Role::Payload))?;
            Ok(ideal_length(&x, &zero)? - n as f64 * entropy_rate(&theta)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_standard_error(&redundancies))
}

/// Mean block entropy `n * h(theta)` over Jeffreys draws, with standard
/// error.  Uses the same per-trial parameter streams as [`empirical_gain`],
/// so a bound assembled from this value refers to the same prior sample the
/// gain was measured on.
pub fn prior_mean_entropy(
    n: usize,
    k: usize,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::InvalidParameter(format!(
            "standard error needs at least 2 trials, got {trials}"
        )));
    }
    let entropies: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let theta = sample_jeffreys(k, r, &mut trial_rng(seed, t, Role::Parameter))?;
            Ok(n as f64 * entropy_rate(&theta)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_standard_error(&entropies))
}

fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

/// Inputs to the gain lower bound, validated at construction so the bound
/// itself cannot fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    n: u64,
    m: u64,
    d: u64,
    epsilon: f64,
    h_n: f64,
    r_bar_n: f64,
}

impl BoundInputs {
    pub fn new(n: u64, m: u64, d: u64, epsilon: f64, h_n: f64, r_bar_n: f64) -> Result<Self> {
        if n < 1 || m < 1 || d < 1 {
            return Err(Error::InvalidParameter(format!(
                "bound inputs require n, m, d >= 1, got n={n}, m={m}, d={d}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie strictly inside (0, 1), got {epsilon}"
            )));
        }
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !nonneg(h_n) || !nonneg(r_bar_n) {
            return Err(Error::InvalidParameter(format!(
                "H_n and R_bar_n must be finite and nonnegative, got {h_n} and {r_bar_n}"
            )));
        }
        Ok(BoundInputs {
            n,
            m,
            d,
            epsilon,
            h_n,
            r_bar_n,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h_n(&self) -> f64 {
        self.h_n
    }

    pub fn r_bar_n(&self) -> f64 {
        self.r_bar_n
    }
}

/// The evaluated gain lower bound together with the terms it was assembled
/// from, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainBound {
    pub value: f64,
    pub r_hat: f64,
    pub r_bar_n: f64,
    pub log2_epsilon: f64,
    pub h_n: f64,
}

/// Guaranteed memorization gain, to confidence 1 - epsilon:
/// `1 + (R_bar_n + log2(epsilon) - hat_r) / (H_n + hat_r)`.
/// Nondecreasing in m with everything else fixed.
pub fn gain_lower_bound(inputs: &BoundInputs) -> GainBound {
    let r_hat = hat_r(inputs.n, inputs.m, inputs.d).expect("inputs validated at construction");
    let log2_epsilon = inputs.epsilon.log2();
    let value = 1.0 + (inputs.r_bar_n + log2_epsilon - r_hat) / (inputs.h_n + r_hat);
    GainBound {
        value,
        r_hat,
        r_bar_n: inputs.r_bar_n,
        log2_epsilon,
        h_n: inputs.h_n,
    }
}

/// Per-parameter outcome of the gain experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    pub theta_id: usize,
    /// Mean memoryless code length over the x-trials, bits.
    pub mean_l_n: f64,
    /// Mean warm-started code length over the same x-trials, bits.
    pub mean_l_n_given_m: f64,
    /// mean_l_n / mean_l_n_given_m.
    pub q_ratio: f64,
}

/// The measured gain distribution and its (1 - epsilon)-lower quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct GainEstimate {
    pub samples: Vec<GainSample>,
    pub epsilon: f64,
    pub g_empirical: f64,
}

impl GainEstimate {
    /// How many samples the quantile definition requires at or above
    /// g_empirical: ceil((1 - epsilon) * trials).
    pub fn required_at_or_above(&self) -> usize {
        quantile_index(self.epsilon, self.samples.len())
    }

    pub fn quantile_invariant_holds(&self) -> bool {
        let at_or_above = self
            .samples
            .iter()
            .filter(|s| s.q_ratio >= self.g_empirical)
            .count();
        at_or_above >= self.required_at_or_above()
    }
}

/// Rank of the quantile order statistic, counted from the largest sample:
/// ceil((1 - epsilon) * t).  The 1e-9 guard keeps an exact integer product
/// from being pushed up a rank by float rounding.
fn quantile_index(epsilon: f64, t: usize) -> usize {
    let raw = (1.0 - epsilon) * t as f64;
    (((raw - 1e-9).ceil()) as usize).clamp(1, t)
}

/// The largest z such that at least ceil((1 - epsilon) * len) values are
/// >= z; equivalently the quantile_index-th largest value.
pub fn lower_quantile(values: &[f64], epsilon: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted[quantile_index(epsilon, sorted.len()) - 1]
}

/// Parameters of one gain experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRun {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub order: usize,
    pub epsilon: f64,
    pub theta_trials: usize,
    pub x_trials: usize,
    pub seed: u64,
}

/// Measures the gain distribution: for each sampled theta, one memory draw
/// y^m fixes the warm counts, then the memoryless and warm-started mean code
/// lengths over fresh x-trials give that theta's ratio q.  g_empirical is the
/// (1 - epsilon)-lower quantile over thetas.
///
/// Per-trial streams are keyed by (seed, trial, role), so reruns at a larger
/// m reuse the same thetas and x blocks and extend each memory in place:
/// m-sweeps are paired.
pub fn empirical_gain(run: &GainRun) -> Result<GainEstimate> {
    if run.theta_trials < 10 {
        return Err(Error::InvalidParameter(format!(
            "a quantile over fewer than 10 parameter trials is meaningless, got {}",
            run.theta_trials
        )));
    }
    if run.x_trials < 1 {
        return Err(Error::InvalidParameter(
            "at least one x-trial is required".to_string(),
        ));
    }
    if run.n < 1 {
        return Err(Error::InvalidParameter(
            "block length must be at least 1".to_string(),
        ));
    }
    if !(run.epsilon > 0.0 && run.epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie strictly inside (0, 1), got {}",
            run.epsilon
        )));
    }
    let zero = ContextCounts::zero(run.k, run.order)?;
    let samples: Vec<GainSample> = (0..run.theta_trials as u64)
        .into_par_iter()
        .map(|t| -> Result<GainSample> {
            let theta = sample_jeffreys(run.k, run.order, &mut trial_rng(run.seed, t, Role::Parameter))?;
            let y = generate(&theta, run.m, &mut trial_rng(run.seed, t, Role::Context))?;
            let warm = ContextCounts::from_sequence(&y, run.k, run.order)?;
            let mut xrng = trial_rng(run.seed, t, Role::Payload);
            let mut sum_cold = 0.0;
            let mut sum_warm = 0.0;
            for _ in 0..run.x_trials {
                let x = generate(&theta, run.n, &mut xrng)?;
                sum_cold += ideal_length(&x, &zero)?;
                sum_warm += ideal_length(&x, &warm)?;
            }
            let mean_l_n = sum_cold / run.x_trials as f64;
            let mean_l_n_given_m = sum_warm / run.x_trials as f64;
            Ok(GainSample {
                theta_id: t as usize,
                mean_l_n,
                mean_l_n_given_m,
                q_ratio: mean_l_n / mean_l_n_given_m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = samples.iter().map(|s| s.q_ratio).collect();
    let g_empirical = lower_quantile(&ratios, run.epsilon);
    Ok(GainEstimate {
        samples,
        epsilon: run.epsilon,
        g_empirical,
    })
}

/// One row of the entropy-convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyGapRow {
    pub m: u64,
    /// Mean warm-started code length per symbol, bits.
    pub per_symbol_bits: f64,
    /// Source entropy rate, bits per symbol.
    pub entropy_rate: f64,
}

/// Entropy-convergence table for a Jeffreys-sampled parameter: per-symbol
/// warm-started length against the entropy rate for each memory size.
pub fn compression_to_entropy_check(
    n: usize,
    k: usize,
    r: usize,
    m_schedule: &[usize],
    x_trials: usize,
    seed: u64,
) -> Result<Vec<EntropyGapRow>> {
    let theta = sample_jeffreys(k, r, &mut trial_rng(seed, 0, Role::Parameter))?;
    compression_to_entropy_check_with(&theta, n, m_schedule, x_trials, seed)
}

/// Same table for a caller-supplied parameter.  Memories are nested (each
/// y^m is a prefix of the longest draw) and all rows are scored on the same
/// x blocks, so the gap column is directly comparable across m.
pub fn compression_to_entropy_check_with(
    theta: &MarkovParameter,
    n: usize,
    m_schedule: &[usize],
    x_trials: usize,
    seed: u64,
) -> Result<Vec<EntropyGapRow>> {
    if n < 1 || x_trials < 1 {
        return Err(Error::InvalidParameter(
            "block length and x-trials must be at least 1".to_string(),
        ));
    }
    if m_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "memory schedule must be strictly increasing".to_string(),
        ));
    }
    let h = entropy_rate(theta)?;
    let m_max = m_schedule.last().copied().unwrap_or(0);
    let y = generate(theta, m_max, &mut trial_rng(seed, 0, Role::Context))?;
    let xs: Vec<SymbolSequence> = {
        let mut xrng = trial_rng(seed, 0, Role::Payload);
        (0..x_trials)
            .map(|_| generate(theta, n, &mut xrng))
            .collect::<Result<Vec<_>>>()?
    };
    let mut rows = Vec::with_capacity(m_schedule.len());
    for &m in m_schedule {
        let prefix = SymbolSequence::new(y.symbols[..m].to_vec());
        let warm = ContextCounts::from_sequence(&prefix, theta.k(), theta.order())?;
        let total: f64 = xs
            .iter()
            .map(|x| ideal_length(x, &warm))
            .sum::<Result<f64>>()?;
        rows.push(EntropyGapRow {
            m: m as u64,
            per_symbol_bits: total / (x_trials as f64 * n as f64),
            entropy_rate: h,
        });
    }
    Ok(rows)
}
