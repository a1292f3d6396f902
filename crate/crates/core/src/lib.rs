//! Frog models on ℕ with site-dependent drifts and geometric lifespans.
//!
//! Walker `n` sleeps at site `n` until an active walker lands there, then
//! survives each step with probability `p_n` and jumps left with probability
//! `l_n`. The crate provides closed-form hitting probabilities, survival
//! classifiers built on them, a Monte Carlo simulator with a firework-process
//! coupling, and brute-force oracles used to cross-check everything else.

pub mod analytics;
pub mod asymptotic;
pub mod criteria;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod simulator;

pub use criteria::{classify, GlobalStatus, LocalStatus, Outcome, Rule, Verdict};
pub use model::{BlockPlan, ModelError, ModelSpec, Occupancy, SequenceFamily};
