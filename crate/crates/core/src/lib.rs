//! Memory-assisted universal source coding.
//!
//! A Krichevsky-Trofimov mixture coder over small-alphabet memoryless and
//! first-order Markov sources that can warm-start from counts distilled out
//! of a previously memorized sequence, plus the redundancy and gain analytics
//! that quantify what the memory buys, and deterministic seeding for the
//! Monte Carlo harnesses that check theory against measurement.

pub mod analytics;
pub mod coder;
pub mod error;
pub mod seeding;
pub mod source;

pub use analytics::{
    compression_to_entropy_check, compression_to_entropy_check_with, empirical_gain,
    gain_lower_bound, hat_r, minimax_redundancy_closed_form, minimax_redundancy_monte_carlo,
    prior_mean_entropy, BoundInputs, EntropyGapRow, GainBound, GainEstimate, GainRun, GainSample,
};
pub use coder::{decode, encode, ideal_length, measure, CodeLength, ContextCounts, EncodedBlock};
pub use error::{Error, Result};
pub use seeding::{trial_rng, Role};
pub use source::{
    entropy_rate, generate, sample_jeffreys, sequence_entropy, stationary_distribution, Alphabet,
    MarkovParameter, SymbolSequence,
};
