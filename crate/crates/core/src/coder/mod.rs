//! Sequential universal coding with the Krichevsky–Trofimov estimator.
//!
//! The coder assigns each symbol the KT conditional probability
//! `(count + 1/2) / (total + k/2)` for its current state, updating counts as
//! it goes, and drives those probabilities through an integer arithmetic
//! coder.  Cold start uses all-zero counts; warm start injects counts
//! distilled from a memorized context sequence, which is the entire
//! difference between the memoryless and memory-assisted schemes.
//!
//! For order-1 models the first symbol of a block is coded under the uniform
//! distribution: the decoder has no preceding state, and the log2(k)-bit cost
//! is negligible against the redundancy terms being studied.

mod arith;
mod block;

pub use arith::{PROB_BITS, PROB_TOTAL};
pub use block::{EncodedBlock, MAGIC, VERSION};

use arith::{ArithmeticDecoder, ArithmeticEncoder, BitReader};
use block::Fnv1a;

use crate::error::{Error, Result};
use crate::source::SymbolSequence;

/// Per-state symbol occurrence counts: the memory distilled from a context
/// sequence, and the running state of the KT estimator.
///
/// Cells saturate at `u32::MAX`; an increment that would overflow first
/// halves every count in the affected state (count scaling).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextCounts {
    k: usize,
    order: usize,
    /// Row-major `k^order x k` occurrence counts.
    counts: Vec<u32>,
    /// Cached row sums.
    totals: Vec<u64>,
}

impl ContextCounts {
    /// All-zero counts: the cold-start state.
    pub fn zero(k: usize, order: usize) -> Result<Self> {
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
        let states = k.pow(order as u32);
        Ok(ContextCounts {
            k,
            order,
            counts: vec![0; states * k],
            totals: vec![0; states],
        })
    }

    /// Tallies a context sequence: `counts[s][a]` is the number of positions
    /// `t >= order` in `y` whose preceding `order` symbols form state `s` and
    /// whose symbol is `a`.  For order 1 the first symbol contributes no
    /// transition.  An empty sequence yields zero counts.
    pub fn from_sequence(y: &SymbolSequence, k: usize, order: usize) -> Result<Self> {
        let mut out = Self::zero(k, order)?;
        y.validate(k)?;
        match order {
            0 => {
                for &a in &y.symbols {
                    out.record(0, a as usize);
                }
            }
            1 => {
                for w in y.symbols.windows(2) {
                    out.record(w[0] as usize, w[1] as usize);
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Builds counts from explicit cells (row-major), mainly for tests and
    /// fuzzing.
    pub fn from_cells(k: usize, order: usize, cells: Vec<u32>) -> Result<Self> {
        let mut out = Self::zero(k, order)?;
        if cells.len() != out.counts.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} cells, got {}",
                out.counts.len(),
                cells.len()
            )));
        }
        out.counts = cells;
        for s in 0..out.num_states() {
            out.totals[s] = out.counts[s * k..(s + 1) * k]
                .iter()
                .map(|&c| c as u64)
                .sum();
        }
        Ok(out)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_states(&self) -> usize {
        self.totals.len()
    }

    pub fn count(&self, state: usize, symbol: usize) -> u32 {
        self.counts[state * self.k + symbol]
    }

    pub fn total(&self, state: usize) -> u64 {
        self.totals[state]
    }

    pub fn is_zero(&self) -> bool {
        self.totals.iter().all(|&t| t == 0)
    }

    /// KT conditional probability `(count + 1/2) / (total + k/2)`.
    /// Always strictly inside (0, 1).
    pub fn kt_conditional(&self, state: usize, symbol: usize) -> f64 {
        let c = self.count(state, symbol) as f64;
        let t = self.total(state) as f64;
        (c + 0.5) / (t + self.k as f64 / 2.0)
    }

    /// Records one occurrence, scaling the state's counts down if the cell
    /// would overflow.
    pub fn record(&mut self, state: usize, symbol: usize) {
        let idx = state * self.k + symbol;
        if self.counts[idx] == u32::MAX {
            let row = &mut self.counts[state * self.k..(state + 1) * self.k];
            for c in row.iter_mut() {
                *c /= 2;
            }
            self.totals[state] = row.iter().map(|&c| c as u64).sum();
        }
        self.counts[idx] += 1;
        self.totals[state] += 1;
    }

    /// FNV-1a over (k, order, cells); used to detect divergent memories
    /// between encoder and decoder.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write(&(self.k as u16).to_le_bytes());
        h.write(&[self.order as u8]);
        for &c in &self.counts {
            h.write(&c.to_le_bytes());
        }
        h.finish()
    }

    /// Quantized cumulative bounds for one state's KT distribution:
    /// `k + 1` values from 0 to 2^32, every symbol at least one quantum wide.
    /// Integer-only so encoder and decoder agree bit-exactly.
    fn quantized_cumulative(&self, state: usize) -> Vec<u64> {
        let k = self.k;
        let denom = (2 * self.totals[state] + k as u64) as u128;
        let mut widths: Vec<u64> = (0..k)
            .map(|a| {
                let num = 2 * self.count(state, a) as u128 + 1;
                let w = ((num << PROB_BITS) / denom) as u64;
                w.max(1)
            })
            .collect();
        let sum: u64 = widths.iter().sum();
        // Pin the total to exactly 2^32 by adjusting the widest symbol; the
        // discrepancy is at most k quanta, the widest symbol at least 2^32/k.
        let widest = (0..k).max_by_key(|&a| widths[a]).unwrap();
        widths[widest] = (widths[widest] as i64 + (PROB_TOTAL as i64 - sum as i64)) as u64;
        let mut cum = Vec::with_capacity(k + 1);
        let mut acc = 0u64;
        cum.push(0);
        for w in widths {
            acc += w;
            cum.push(acc);
        }
        debug_assert_eq!(acc, PROB_TOTAL);
        cum
    }
}

/// Ideal and realized code lengths for one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeLength {
    /// -log2 of the probability the KT model assigned to the whole sequence.
    pub ideal_bits: f64,
    /// Bits actually emitted by the arithmetic coder.
    pub actual_bits: u64,
}

/// Sequential KT model state shared by the length, encode, and decode walks.
struct KtWalk {
    counts: ContextCounts,
    prev: Option<u16>,
}

enum StepModel {
    /// Code under the KT conditional for this state.
    State(usize),
    /// Order-1 first symbol: uniform over k.
    Uniform,
}

impl KtWalk {
    fn new(warm: &ContextCounts) -> Self {
        KtWalk {
            counts: warm.clone(),
            prev: None,
        }
    }

    fn next_model(&self) -> StepModel {
        match self.counts.order() {
            0 => StepModel::State(0),
            _ => match self.prev {
                Some(p) => StepModel::State(p as usize),
                None => StepModel::Uniform,
            },
        }
    }

    /// Advances the model past `symbol` and returns its ideal cost in bits.
    fn step(&mut self, symbol: u16) -> f64 {
        let cost = match self.next_model() {
            StepModel::State(s) => {
                let p = self.counts.kt_conditional(s, symbol as usize);
                self.counts.record(s, symbol as usize);
                -p.log2()
            }
            StepModel::Uniform => (self.counts.k() as f64).log2(),
        };
        self.prev = Some(symbol);
        cost
    }

    /// Quantized cumulative bounds for the next symbol's distribution.
    fn next_cumulative(&self, uniform_scratch: &[u64]) -> Vec<u64> {
        match self.next_model() {
            StepModel::State(s) => self.counts.quantized_cumulative(s),
            StepModel::Uniform => uniform_scratch.to_vec(),
        }
    }
}

/// Uniform cumulative bounds over k symbols (the zero-count KT row is exactly
/// uniform, so reuse the quantizer).
fn uniform_cumulative(k: usize) -> Vec<u64> {
    ContextCounts::zero(k, 0)
        .expect("k validated by caller")
        .quantized_cumulative(0)
}

fn check_inputs(x: &SymbolSequence, warm: &ContextCounts) -> Result<()> {
    x.validate(warm.k())
}

/// Total ideal code length of `x` under the sequential KT model started from
/// a copy of `warm` (which is not mutated).
pub fn ideal_length(x: &SymbolSequence, warm: &ContextCounts) -> Result<f64> {
    check_inputs(x, warm)?;
    let mut walk = KtWalk::new(warm);
    Ok(x.symbols.iter().map(|&a| walk.step(a)).sum())
}

/// Ideal length when the walk starts in a known state rather than at the
/// uniform boundary; used by tests to check that counting and coding compose
/// exactly like one continuous pass.
#[cfg(test)]
fn ideal_length_from_state(
    x: &SymbolSequence,
    warm: &ContextCounts,
    prev: Option<u16>,
) -> Result<f64> {
    check_inputs(x, warm)?;
    let mut walk = KtWalk::new(warm);
    walk.prev = prev;
    Ok(x.symbols.iter().map(|&a| walk.step(a)).sum())
}

/// Arithmetic-codes `x` under the same sequential KT probabilities used by
/// [`ideal_length`].
pub fn encode(x: &SymbolSequence, warm: &ContextCounts) -> Result<EncodedBlock> {
    check_inputs(x, warm)?;
    if warm.k() > u16::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "alphabet size {} does not fit the wire format",
            warm.k()
        )));
    }
    let uniform = uniform_cumulative(warm.k());
    let mut walk = KtWalk::new(warm);
    let mut coder = ArithmeticEncoder::new();
    for &a in &x.symbols {
        let cum = walk.next_cumulative(&uniform);
        coder.encode(cum[a as usize], cum[a as usize + 1]);
        walk.step(a);
    }
    let payload = coder.finish();
    let payload_length_bits = payload.len_bits();
    let block = EncodedBlock {
        k: warm.k() as u16,
        order: warm.order() as u8,
        n: x.len() as u64,
        context_fingerprint: warm.fingerprint(),
        payload_length_bits,
        payload: payload.into_bytes(),
    };
    debug_assert!(block.validate().is_ok());
    Ok(block)
}

/// Convenience: both lengths for one block.
pub fn measure(x: &SymbolSequence, warm: &ContextCounts) -> Result<CodeLength> {
    Ok(CodeLength {
        ideal_bits: ideal_length(x, warm)?,
        actual_bits: encode(x, warm)?.payload_length_bits,
    })
}

/// Inverse of [`encode`].  Requires the decoder's warm counts to match the
/// encoder's (checked by fingerprint) and the expected length to match the
/// header.
pub fn decode(block: &EncodedBlock, warm: &ContextCounts, n: usize) -> Result<SymbolSequence> {
    block.validate()?;
    if (block.k as usize, block.order as usize) != (warm.k(), warm.order()) {
        return Err(Error::ModelMismatch {
            expected: (block.k as usize, block.order as usize),
            got: (warm.k(), warm.order()),
        });
    }
    let got = warm.fingerprint();
    if got != block.context_fingerprint {
        return Err(Error::ContextMismatch {
            expected: block.context_fingerprint,
            got,
        });
    }
    if n as u64 != block.n {
        return Err(Error::MalformedBlock(format!(
            "expected length {n} does not match block header {}",
            block.n
        )));
    }

    let k = warm.k();
    let uniform = uniform_cumulative(k);
    let mut walk = KtWalk::new(warm);
    let mut dec = ArithmeticDecoder::new(BitReader::new(&block.payload, block.payload_length_bits));
    let mut symbols = Vec::with_capacity(n);
    for _ in 0..n {
        let cum = walk.next_cumulative(&uniform);
        let t = dec.target();
        // cum is strictly increasing with cum[0] = 0, cum[k] = 2^32 and
        // t < 2^32, so the partition point is a valid symbol.
        let a = cum.partition_point(|&c| c <= t) - 1;
        dec.consume(cum[a], cum[a + 1]);
        walk.step(a as u16);
        symbols.push(a as u16);
    }
    Ok(SymbolSequence::new(symbols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{trial_rng, Role};
    use crate::source::{generate, sample_jeffreys};
    use proptest::prelude::*;
    use rand::Rng;

    fn seq(symbols: &[u16]) -> SymbolSequence {
        SymbolSequence::new(symbols.to_vec())
    }

    #[test]
    fn accumulate_empty_is_zero() {
        let c = ContextCounts::from_sequence(&SymbolSequence::empty(), 2, 0).unwrap();
        assert!(c.is_zero());
        let c = ContextCounts::from_sequence(&SymbolSequence::empty(), 3, 1).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn accumulate_order0_tally() {
        let c = ContextCounts::from_sequence(&seq(&[0, 0, 1, 0]), 2, 0).unwrap();
        assert_eq!(c.count(0, 0), 3);
        assert_eq!(c.count(0, 1), 1);
        assert_eq!(c.total(0), 4);
    }

    #[test]
    fn accumulate_order1_transitions() {
        // Transitions: 0->0, 0->1, 1->0.
        let c = ContextCounts::from_sequence(&seq(&[0, 0, 1, 0]), 2, 1).unwrap();
        assert_eq!(c.count(0, 0), 1);
        assert_eq!(c.count(0, 1), 1);
        assert_eq!(c.count(1, 0), 1);
        assert_eq!(c.count(1, 1), 0);
        assert_eq!(c.total(0), 2);
        assert_eq!(c.total(1), 1);
    }

    #[test]
    fn accumulate_rejects_out_of_range_symbols() {
        assert!(ContextCounts::from_sequence(&seq(&[0, 2]), 2, 0).is_err());
    }

    #[test]
    fn kt_conditional_values() {
        let zero = ContextCounts::zero(2, 0).unwrap();
        assert_eq!(zero.kt_conditional(0, 0), 0.5);
        let c = ContextCounts::from_cells(2, 0, vec![1, 0]).unwrap();
        assert_eq!(c.kt_conditional(0, 0), 0.75);
        // (1 + 1/2) / (4 + 1) = 0.3.
        let c = ContextCounts::from_cells(2, 0, vec![3, 1]).unwrap();
        assert_eq!(c.kt_conditional(0, 1), 0.3);
    }

    #[test]
    fn kt_conditionals_normalize() {
        let mut rng = trial_rng(3, 0, Role::Aux);
        for _ in 0..50 {
            let k = rng.gen_range(2..=8);
            let cells: Vec<u32> = (0..k).map(|_| rng.gen_range(0..1000)).collect();
            let c = ContextCounts::from_cells(k, 0, cells).unwrap();
            let sum: f64 = (0..k).map(|a| c.kt_conditional(0, a)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
        }
    }

    #[test]
    fn count_scaling_halves_saturated_state() {
        let mut c = ContextCounts::from_cells(2, 0, vec![u32::MAX, 7]).unwrap();
        c.record(0, 0);
        assert_eq!(c.count(0, 0), u32::MAX / 2 + 1);
        assert_eq!(c.count(0, 1), 3);
        assert_eq!(c.total(0), (u32::MAX / 2 + 3 + 1) as u64);
    }

    #[test]
    fn ideal_length_two_zeros() {
        let zero = ContextCounts::zero(2, 0).unwrap();
        let bits = ideal_length(&seq(&[0, 0]), &zero).unwrap();
        // -log2(1/2 * 3/4) = log2(8/3)
        assert!((bits - (8.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn ideal_length_empty_is_zero() {
        let zero = ContextCounts::zero(4, 1).unwrap();
        assert_eq!(ideal_length(&SymbolSequence::empty(), &zero).unwrap(), 0.0);
    }

    #[test]
    fn warm_start_dominates_on_constant_sequence() {
        let x = seq(&[0u16; 64]);
        let y = seq(&vec![0u16; 4096]);
        let zero = ContextCounts::zero(2, 0).unwrap();
        let warm = ContextCounts::from_sequence(&y, 2, 0).unwrap();
        let cold_bits = ideal_length(&x, &zero).unwrap();
        let warm_bits = ideal_length(&x, &warm).unwrap();
        assert!(warm_bits < cold_bits, "{warm_bits} vs {cold_bits}");
    }

    #[test]
    fn ideal_length_does_not_mutate_warm() {
        let y = seq(&[0, 1, 1, 0, 1]);
        let warm = ContextCounts::from_sequence(&y, 2, 0).unwrap();
        let before = warm.clone();
        ideal_length(&seq(&[1, 0, 1]), &warm).unwrap();
        assert_eq!(warm, before);
    }

    #[test]
    fn warm_start_telescopes_for_order0() {
        // KT is a sequential mixture: coding y then x from carried counts is
        // the same distribution as coding the concatenation.
        let mut rng = trial_rng(8, 0, Role::Aux);
        for _ in 0..20 {
            let k = rng.gen_range(2..=5);
            let y: Vec<u16> = (0..rng.gen_range(0..200))
                .map(|_| rng.gen_range(0..k) as u16)
                .collect();
            let x: Vec<u16> = (0..rng.gen_range(0..200))
                .map(|_| rng.gen_range(0..k) as u16)
                .collect();
            let mut yx = y.clone();
            yx.extend_from_slice(&x);
            let zero = ContextCounts::zero(k, 0).unwrap();
            let warm = ContextCounts::from_sequence(&seq(&y), k, 0).unwrap();
            let lhs = ideal_length(&seq(&x), &warm).unwrap();
            let rhs =
                ideal_length(&seq(&yx), &zero).unwrap() - ideal_length(&seq(&y), &zero).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn warm_start_telescopes_for_order1_from_carried_state() {
        // Carrying both the counts and the boundary state into the walk
        // reproduces the concatenated pass exactly, for arbitrary sequences.
        // The public coder replaces the carried state with a uniform first
        // symbol; that convention is pinned by the test below.
        let mut rng = trial_rng(9, 0, Role::Aux);
        for _ in 0..20 {
            let k = rng.gen_range(2..=5);
            let y: Vec<u16> = (1..=rng.gen_range(1..300))
                .map(|_| rng.gen_range(0..k) as u16)
                .collect();
            let x: Vec<u16> = (0..rng.gen_range(0..300))
                .map(|_| rng.gen_range(0..k) as u16)
                .collect();
            let mut yx = y.clone();
            yx.extend_from_slice(&x);
            let zero = ContextCounts::zero(k, 1).unwrap();
            let warm = ContextCounts::from_sequence(&seq(&y), k, 1).unwrap();
            let lhs = ideal_length_from_state(&seq(&x), &warm, y.last().copied()).unwrap();
            let rhs =
                ideal_length(&seq(&yx), &zero).unwrap() - ideal_length(&seq(&y), &zero).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "k={k} lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn warm_start_telescoping_discrepancy_is_small_on_typical_data() {
        // With the uniform boundary the order-1 identity is only approximate:
        // the concatenated pass codes x_1 from the carried state and records
        // that transition, the warm-started pass does neither.  On sequences
        // that are typical for their source the discrepancy stays within
        // 2 log2(k) bits; adversarial strings can exceed it, so this corpus
        // is pinned by seed.
        for trial in 0..20u64 {
            let k = 2 + (trial % 3) as usize;
            let theta = sample_jeffreys(k, 1, &mut trial_rng(14, trial, Role::Parameter)).unwrap();
            let mut grng = trial_rng(14, trial, Role::Payload);
            let y = match generate(&theta, 1000, &mut grng) {
                Ok(y) => y,
                Err(_) => continue, // numerically reducible draw
            };
            let x = generate(&theta, 300, &mut grng).unwrap();
            let mut yx = y.symbols.clone();
            yx.extend_from_slice(&x.symbols);
            let zero = ContextCounts::zero(k, 1).unwrap();
            let warm = ContextCounts::from_sequence(&y, k, 1).unwrap();
            let lhs = ideal_length(&x, &warm).unwrap();
            let rhs =
                ideal_length(&seq(&yx), &zero).unwrap() - ideal_length(&y, &zero).unwrap();
            let tol = 2.0 * (k as f64).log2();
            assert!(
                (lhs - rhs).abs() <= tol,
                "trial {trial} k={k}: lhs {lhs} rhs {rhs}"
            );
        }
    }

    #[test]
    fn order1_first_symbol_costs_log2_k() {
        let warm = ContextCounts::from_sequence(&seq(&[0, 1, 2, 0, 1]), 3, 1).unwrap();
        for a in 0..3u16 {
            let bits = ideal_length(&seq(&[a]), &warm).unwrap();
            assert!((bits - 3.0f64.log2()).abs() < 1e-12, "symbol {a}: {bits}");
        }
    }

    #[test]
    fn ideal_length_matches_gamma_closed_form() {
        // For a binary all-zeros block of length n the KT mixture probability
        // has the closed form Gamma(n + 1/2) / (Gamma(1/2) n!); at n = 1000
        // that is 5.808820543938812 bits.  The sequential product must agree.
        let zero = ContextCounts::zero(2, 0).unwrap();
        let x = seq(&vec![0u16; 1000]);
        let bits = ideal_length(&x, &zero).unwrap();
        assert!(
            (bits - 5.808820543938812).abs() < 1e-6,
            "got {bits}"
        );
        // The realized code obeys the termination bound: at most
        // ceil(5.8088) + 2 = 8 bits for a thousand zeros.
        assert!(encode(&x, &zero).unwrap().payload_length_bits <= 8);
    }

    #[test]
    fn encode_empty_sequence() {
        let zero = ContextCounts::zero(2, 0).unwrap();
        let block = encode(&SymbolSequence::empty(), &zero).unwrap();
        assert!(block.payload_length_bits <= 2);
        let back = decode(&block, &zero, 0).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn roundtrip_small_exhaustive() {
        // Every binary and ternary sequence up to length 7, cold start.
        for k in [2usize, 3] {
            let zero = ContextCounts::zero(k, 0).unwrap();
            for len in 0..=7usize {
                for code in 0..k.pow(len as u32) {
                    let mut x = Vec::with_capacity(len);
                    let mut c = code;
                    for _ in 0..len {
                        x.push((c % k) as u16);
                        c /= k;
                    }
                    let x = seq(&x);
                    let block = encode(&x, &zero).unwrap();
                    let back = decode(&block, &zero, len).unwrap();
                    assert_eq!(back, x, "k={k} len={len} code={code}");
                }
            }
        }
    }

    #[test]
    fn roundtrip_order1_with_warm_counts() {
        let mut rng = trial_rng(10, 0, Role::Aux);
        for trial in 0..200u64 {
            let k = rng.gen_range(2..=8);
            let order = rng.gen_range(0..=1);
            let n = rng.gen_range(0..500);
            let m = rng.gen_range(0..2000);
            let mut prng = trial_rng(10, trial, Role::Parameter);
            let theta = sample_jeffreys(k, order, &mut prng).unwrap();
            let mut crng = trial_rng(10, trial, Role::Context);
            let y = generate(&theta, m, &mut crng).unwrap();
            let warm = ContextCounts::from_sequence(&y, k, order).unwrap();
            let mut xrng = trial_rng(10, trial, Role::Payload);
            let x = generate(&theta, n, &mut xrng).unwrap();

            let block = encode(&x, &warm).unwrap();
            let back = decode(&block, &warm, n).unwrap();
            assert_eq!(back, x, "trial {trial}");

            let ideal = ideal_length(&x, &warm).unwrap();
            let actual = block.payload_length_bits as f64;
            assert!(ideal <= actual + 1.0, "trial {trial}: {ideal} vs {actual}");
            assert!(
                actual <= ideal.ceil() + 2.0,
                "trial {trial}: {actual} vs {ideal}"
            );
        }
    }

    #[test]
    fn decode_rejects_divergent_memory() {
        let y = seq(&[0, 1, 0, 0, 1, 1, 1, 0]);
        let warm = ContextCounts::from_sequence(&y, 2, 0).unwrap();
        let x = seq(&[1, 1, 0, 1]);
        let block = encode(&x, &warm).unwrap();
        let other = ContextCounts::from_sequence(&seq(&[0, 1, 0, 0, 1, 1, 0, 0]), 2, 0).unwrap();
        match decode(&block, &other, 4) {
            Err(Error::ContextMismatch { .. }) => {}
            other => panic!("expected context mismatch, got {other:?}"),
        }
        // Mismatched model shape is caught before the fingerprint.
        let wrong_shape = ContextCounts::zero(3, 0).unwrap();
        assert!(matches!(
            decode(&block, &wrong_shape, 4),
            Err(Error::ModelMismatch { .. })
        ));
        // Wrong expected length.
        assert!(decode(&block, &warm, 5).is_err());
    }

    #[test]
    fn decode_detects_truncated_payload() {
        let zero = ContextCounts::zero(2, 0).unwrap();
        let x = seq(&(0..1000).map(|i| (i % 2) as u16).collect::<Vec<_>>());
        let block = encode(&x, &zero).unwrap();

        // Dropping a payload byte without fixing the header is structural.
        let mut chopped = block.clone();
        chopped.payload.pop();
        assert!(matches!(
            decode(&chopped, &zero, 1000),
            Err(Error::MalformedBlock(_))
        ));

        // Shaving one bit off the header count: either the structure check
        // fires or the lost bit corrupts the tail of the decode.
        let mut shaved = block.clone();
        shaved.payload_length_bits -= 1;
        match decode(&shaved, &zero, 1000) {
            Err(_) => {}
            Ok(back) => assert_ne!(back, x, "decoder failed to notice a lost bit"),
        }
    }

    #[test]
    fn decode_detects_flipped_payload_bit() {
        let zero = ContextCounts::zero(2, 0).unwrap();
        let mut rng = trial_rng(11, 0, Role::Payload);
        let x = seq(&(0..1000).map(|_| rng.gen_range(0..2) as u16).collect::<Vec<_>>());
        let block = encode(&x, &zero).unwrap();
        let mut corrupt = block.clone();
        let idx = corrupt.payload.len() / 4;
        corrupt.payload[idx] ^= 0x10;
        match decode(&corrupt, &zero, 1000) {
            Err(_) => {}
            Ok(back) => assert_ne!(back, x, "decoder failed to notice a flipped bit"),
        }
    }

    #[test]
    fn golden_block_bytes() {
        // Pins the wire format and the coder's bit-exact output.
        let y = seq(&[0, 0, 1, 0, 2, 1, 0, 0]);
        let warm = ContextCounts::from_sequence(&y, 3, 1).unwrap();
        let x = seq(&[0, 1, 2, 0, 0, 1, 0, 2, 2, 0]);
        let block = encode(&x, &warm).unwrap();
        let bytes = block.to_bytes();
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, golden_hex(), "wire bytes changed");
        let back = EncodedBlock::from_bytes(&bytes).unwrap();
        assert_eq!(decode(&back, &warm, 10).unwrap(), x);
    }

    fn golden_hex() -> String {
        // Captured from a reference run; regenerate deliberately if the
        // format version is bumped.
        include_str!("golden_block.hex").trim().to_string()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn roundtrip_random_cells(
            k in 2usize..=6,
            order in 0usize..=1,
            xs in prop::collection::vec(0u16..6, 0..200),
            cell_seed in 0u64..1_000,
        ) {
            let x: Vec<u16> = xs.into_iter().map(|s| s % k as u16).collect();
            let states = k.pow(order as u32);
            let mut rng = trial_rng(cell_seed, 0, Role::Aux);
            let cells: Vec<u32> = (0..states * k).map(|_| rng.gen_range(0..5000)).collect();
            let warm = ContextCounts::from_cells(k, order, cells).unwrap();
            let x = seq(&x);
            let block = encode(&x, &warm).unwrap();
            let back = decode(&block, &warm, x.len()).unwrap();
            prop_assert_eq!(back, x.clone());

            let ideal = ideal_length(&x, &warm).unwrap();
            let actual = block.payload_length_bits as f64;
            prop_assert!(ideal <= actual + 1.0);
            prop_assert!(actual <= ideal.ceil() + 2.0);
        }
    }
}
