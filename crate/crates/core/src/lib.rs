//! Pattern occurrence machinery for k-ary words and permutations.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`word`]: words, canonical patterns, order-isomorphism and exact
//!   occurrence counting. Everything else is checked against this module.
//! * [`automaton`]: the instance set of a pattern over `[k]`, prefix state
//!   vectors and the avoidance-detection automaton built from them.
//! * [`transfer`]: exact avoider counts from the automaton's letter-count
//!   matrix, the Markov-chain view of the same walk, growth rates, the
//!   pure-birth upper bound and a seeded Monte Carlo simulator.
//! * [`enumerate`]: exhaustive count tables over `[k]^n` and over
//!   permutations, occurrence-subsequence histograms and Wilf comparisons.
//! * [`identities`]: the word/permutation inclusion-exclusion identities,
//!   the exponential generating function relation and closed forms.
//!
//! All counts are arbitrary precision.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod automaton;
pub mod combinat;
pub mod enumerate;
mod error;
pub mod identities;
pub mod provider;
pub mod transfer;
pub mod word;

pub use automaton::{AutomatonGraph, InstanceSet, StateVector, DEFAULT_STATE_LIMIT};
pub use enumerate::{CountTable, Domain, EnumConfig, SubseqHistogram};
pub use error::{Error, Result};
pub use provider::{CountProvider, MemoProvider, TableStore};
pub use transfer::{Rational, SimulationResult, TransitionMatrix};
pub use word::{Occurrence, Pattern, PatternSet, Word};
