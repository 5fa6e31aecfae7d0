//! Parametric source family: memoryless (order 0) and first-order Markov
//! sources over a k-ary alphabet, with Jeffreys-prior parameter sampling,
//! sequence generation, and exact entropy computation.
//!
//! All entropies are in bits (base-2 logarithms throughout the crate).

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Tolerance for "rows sum to one" validation.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Power-iteration fixed-point tolerance for the stationary distribution.
const STATIONARY_TOL: f64 = 1e-12;

/// Power-iteration budget before declaring non-convergence.
const STATIONARY_MAX_ITERS: usize = 100_000;

/// A k-ary symbol alphabet; symbols are the integers `0..k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    k: usize,
}

impl Alphabet {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size must be at least 2, got {k}"
            )));
        }
        Ok(Alphabet { k })
    }

    pub fn size(&self) -> usize {
        self.k
    }
}

/// A sequence of symbols from some k-ary alphabet.
///
/// Symbols are stored as `u16`; validity against a particular alphabet is
/// checked by the operations that consume the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub symbols: Vec<u16>,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<u16>) -> Self {
        SymbolSequence { symbols }
    }

    pub fn empty() -> Self {
        SymbolSequence { symbols: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Checks every symbol lies in `0..k`.
    pub fn validate(&self, k: usize) -> Result<()> {
        for &s in &self.symbols {
            if (s as usize) >= k {
                return Err(Error::SymbolOutOfRange { symbol: s, k });
            }
        }
        Ok(())
    }
}

impl From<Vec<u16>> for SymbolSequence {
    fn from(symbols: Vec<u16>) -> Self {
        SymbolSequence { symbols }
    }
}

/// The source parameter: one probability row per state.
///
/// An order-0 source has a single state (i.i.d. draws); an order-1 source has
/// k states, one per previous symbol.  The free dimension is
/// `d = k^order * (k - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovParameter {
    k: usize,
    order: usize,
    /// `rows[s][a]` = P(next symbol = a | state = s); row-major, k^order rows.
    rows: Vec<Vec<f64>>,
}

impl MarkovParameter {
    pub fn new(k: usize, order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_k_order(k, order)?;
        let want_states = k.pow(order as u32);
        if rows.len() != want_states {
            return Err(Error::InvalidParameter(format!(
                "expected {want_states} rows for k={k}, order={order}, got {}",
                rows.len()
            )));
        }
        for (s, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "row {s} has length {}, expected {k}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "row {s} contains an entry outside [0, 1]: {p}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "row {s} sums to {sum}, outside 1 +/- {ROW_SUM_TOL}"
                )));
            }
        }
        Ok(MarkovParameter { k, order, rows })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    /// Free parameter dimension d = k^order * (k - 1).
    pub fn dimension(&self) -> usize {
        self.k.pow(self.order as u32) * (self.k - 1)
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

fn validate_k_order(k: usize, order: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {k}"
        )));
    }
    if order > 1 {
        return Err(Error::InvalidParameter(format!(
            "only orders 0 and 1 are supported, got {order}"
        )));
    }
    Ok(())
}

/// Draws one probability row from the symmetric Dirichlet(1/2, ..., 1/2).
fn dirichlet_half_row<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    // Gamma(1/2, 1) draws normalized to sum 1.  A draw can underflow to 0,
    // which is fine (zero entries are permitted); an all-zero row is retried.
    let gamma = Gamma::new(0.5, 1.0).expect("valid gamma parameters");
    loop {
        let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            return draws.into_iter().map(|g| g / sum).collect();
        }
    }
}

/// Samples a source parameter from Jeffreys' prior.
///
/// Each of the k^order rows is an independent symmetric Dirichlet(1/2)
/// draw — the Jeffreys prior of a multinomial row, applied per state for
/// order 1.  Deterministic given the generator state.
pub fn sample_jeffreys<R: Rng>(k: usize, order: usize, rng: &mut R) -> Result<MarkovParameter> {
    validate_k_order(k, order)?;
    let states = k.pow(order as u32);
    let rows: Vec<Vec<f64>> = (0..states).map(|_| dirichlet_half_row(k, rng)).collect();
    MarkovParameter::new(k, order, rows)
}

fn draw_from_row<R: Rng>(row: &[f64], rng: &mut R) -> u16 {
    let u: f64 = rng.gen::<f64>();
    let mut acc = 0.0;
    for (a, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return a as u16;
        }
    }
    // Guard against the row summing to slightly under 1.0: fall back to the
    // last symbol with nonzero probability.
    row.iter()
        .rposition(|&p| p > 0.0)
        .map(|a| a as u16)
        .unwrap_or((row.len() - 1) as u16)
}

/// Generates a length-n sequence from the source.
///
/// Order 0 draws i.i.d. from the single row.  Order 1 draws the initial
/// symbol from the stationary distribution and each subsequent symbol from
/// the row of the previous one.
pub fn generate<R: Rng>(theta: &MarkovParameter, n: usize, rng: &mut R) -> Result<SymbolSequence> {
    let mut symbols = Vec::with_capacity(n);
    if n == 0 {
        return Ok(SymbolSequence::new(symbols));
    }
    match theta.order() {
        0 => {
            let row = theta.row(0);
            for _ in 0..n {
                symbols.push(draw_from_row(row, rng));
            }
        }
        1 => {
            let pi = stationary_distribution(theta)?;
            let mut state = draw_from_row(&pi, rng) as usize;
            symbols.push(state as u16);
            for _ in 1..n {
                let next = draw_from_row(theta.row(state), rng);
                symbols.push(next);
                state = next as usize;
            }
        }
        _ => unreachable!("orders above 1 are rejected at construction"),
    }
    Ok(SymbolSequence::new(symbols))
}

/// Stationary distribution of an order-1 chain by power iteration.
///
/// Errors on reducible chains (checked by strong connectivity of the
/// positive-transition graph) and on failure to reach the fixed point within
/// the iteration budget, rather than returning a silently wrong vector.
pub fn stationary_distribution(theta: &MarkovParameter) -> Result<Vec<f64>> {
    if theta.order() != 1 {
        return Err(Error::InvalidParameter(
            "stationary distribution requires an order-1 source".to_string(),
        ));
    }
    let k = theta.k();
    if !strongly_connected(theta) {
        return Err(Error::NumericFailure(
            "transition matrix is reducible: stationary distribution is not unique".to_string(),
        ));
    }

    let mut pi = vec![1.0 / k as f64; k];
    let mut next = vec![0.0; k];
    for _ in 0..STATIONARY_MAX_ITERS {
        for x in next.iter_mut() {
            *x = 0.0;
        }
        for (&ps, row) in pi.iter().zip(theta.rows()) {
            if ps == 0.0 {
                continue;
            }
            for (a, &p) in row.iter().enumerate() {
                next[a] += ps * p;
            }
        }
        // Renormalize to absorb rounding drift.
        let sum: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= sum;
        }
        let delta: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if delta <= STATIONARY_TOL {
            return Ok(pi);
        }
    }
    Err(Error::NumericFailure(format!(
        "power iteration did not converge within {STATIONARY_MAX_ITERS} iterations \
         (periodic or near-reducible chain)"
    )))
}

/// Strong connectivity of the positive-probability transition graph.
fn strongly_connected(theta: &MarkovParameter) -> bool {
    let k = theta.k();
    let reach_from = |start: usize, transpose: bool| -> Vec<bool> {
        let mut seen = vec![false; k];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(s) = stack.pop() {
            for (t, seen_t) in seen.iter_mut().enumerate() {
                let p = if transpose {
                    theta.row(t)[s]
                } else {
                    theta.row(s)[t]
                };
                if p > 0.0 && !*seen_t {
                    *seen_t = true;
                    stack.push(t);
                }
            }
        }
        seen
    };
    reach_from(0, false).iter().all(|&v| v) && reach_from(0, true).iter().all(|&v| v)
}

fn row_entropy_bits(row: &[f64]) -> f64 {
    row.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Entropy rate in bits per symbol.
///
/// Order 0: the row entropy.  Order 1: the stationary-weighted row entropy
/// `sum_s pi_s * H(row_s)`.  Terms with zero probability contribute zero.
pub fn entropy_rate(theta: &MarkovParameter) -> Result<f64> {
    match theta.order() {
        0 => Ok(row_entropy_bits(theta.row(0))),
        1 => {
            let pi = stationary_distribution(theta)?;
            Ok(pi
                .iter()
                .zip(theta.rows())
                .map(|(&ps, row)| ps * row_entropy_bits(row))
                .sum())
        }
        _ => unreachable!(),
    }
}

/// Entropy of a length-n block, `n * entropy_rate` (stationary convention:
/// the O(log k) initial-state entropy is not charged).
pub fn sequence_entropy(theta: &MarkovParameter, n: usize) -> Result<f64> {
    Ok(n as f64 * entropy_rate(theta)?)
}
