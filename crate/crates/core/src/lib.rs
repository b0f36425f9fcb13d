//! Best-arm identification under resource constraints.
//!
//! Pulling an arm yields a stochastic reward and consumes a stochastic
//! amount of each of `L` resources; the goal is to identify the arm with the
//! highest mean reward before any resource budget runs out. This crate
//! provides:
//!
//! - [`instance`]: problem descriptions, outcome sampling (deterministic,
//!   independent-Bernoulli, and coupled-uniform consumption), and the JSON
//!   instance format;
//! - [`sim`]: the single-trial loop with strict breach semantics and
//!   deterministic per-trial seeding;
//! - [`shrr`]: sequential halving with resource rationing — a phased
//!   elimination strategy that is feasible with certainty;
//! - [`baselines`]: anytime comparison strategies (uniform, UCB, anytime
//!   LUCB, doubling sequential halving);
//! - [`complexity`]: hardness measures, convergence rates, and failure
//!   probability bounds, plus the hard-instance families they are tight on;
//! - [`harness`]: config-driven Monte Carlo experiments with reproducible
//!   parallel execution and CSV output.
//!
//! The `parallel` feature (on by default) runs trials on a rayon pool;
//! disable it for single-threaded or wasm builds. Results never depend on
//! the thread count.

#![forbid(unsafe_code)]

pub mod baselines;
pub mod complexity;
pub mod harness;
pub mod instance;
mod numeric;
pub mod shrr;
pub mod sim;
pub mod strategy;

pub use instance::{ConsumptionMode, InstanceError, InstanceSpec, Outcome, RewardModel};
pub use sim::{child_seed, simulate, SimError, TrialRecord};
pub use strategy::{Selection, Strategy, StrategyError};
