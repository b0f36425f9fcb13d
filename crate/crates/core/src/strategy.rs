//! The interaction contract between a strategy and the simulation loop.
//!
//! A strategy is constructed from the public instance data only — arm count,
//! resource count, and capacities — and never sees the latent means. On each
//! step the loop asks [`Strategy::select`]; a `Pull(arm)` answer is followed
//! by [`Strategy::observe`] with the sampled outcome (unless the pull breached
//! a capacity, in which case the outcome is discarded and the run ends).

use crate::instance::Outcome;
use thiserror::Error;

/// Answer of a strategy when asked what to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Pull the given arm.
    Pull(usize),
    /// Stop and recommend the given arm.
    Finished(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("select() called after the strategy finished")]
    SelectAfterFinished,
    #[error("observe() for arm {got} does not match the pending selection {expected:?}")]
    ObservationMismatch { expected: Option<usize>, got: usize },
    #[error("outcome carries {got} consumptions, strategy expects {expected}")]
    ResourceMismatch { expected: usize, got: usize },
}

/// A sequential arm-pulling strategy.
pub trait Strategy {
    /// Next action. Calling this again after it returned
    /// [`Selection::Finished`] is a contract violation.
    fn select(&mut self) -> Result<Selection, StrategyError>;

    /// Delivers the outcome of the most recently selected pull.
    fn observe(&mut self, arm: usize, outcome: &Outcome) -> Result<(), StrategyError>;

    /// The arm the strategy would currently recommend as best.
    ///
    /// Always a valid arm index; before any observation it defaults to the
    /// lowest-indexed candidate.
    fn recommendation(&self) -> usize;
}

/// `ceil(log2(k))`, the number of halving phases for `k` arms.
pub fn ceil_log2(k: usize) -> u32 {
    if k <= 1 {
        0
    } else {
        (k - 1).ilog2() + 1
    }
}

/// Index of the maximal value; the smallest index wins ties.
pub(crate) fn argmax_first(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
    }

    #[test]
    fn argmax_prefers_smaller_index_on_ties() {
        assert_eq!(argmax_first([0.0, 0.0, 0.0]), 0);
        assert_eq!(argmax_first([0.1, 0.5, 0.5]), 1);
        assert_eq!(argmax_first([f64::NEG_INFINITY]), 0);
    }
}
