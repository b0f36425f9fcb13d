//! Single-trial simulation loop with budget semantics, plus seed derivation.
//!
//! The loop enforces the capacity constraints for strategies that do not stop
//! on their own: a pull whose realized consumption pushes any cumulative total
//! strictly above its capacity ends the run as *breached*. The breaching
//! pull's outcome is discarded — it is neither delivered to the strategy nor
//! counted in the reported totals — and the recommendation held before that
//! pull is returned. Every reported record is therefore feasible.

use crate::instance::{InstanceError, InstanceSpec};
use crate::numeric::CompensatedSum;
use crate::strategy::{Selection, Strategy, StrategyError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Result of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Arm identified as best.
    pub recommended_arm: usize,
    /// Number of pulls whose outcomes were kept (a discarded breaching pull
    /// does not count).
    pub pulls: u64,
    /// Total kept consumption per resource; never exceeds the capacities.
    pub total_consumption: Vec<f64>,
    /// Whether the recommendation equals the instance's true best arm.
    pub correct: bool,
    /// Whether the run was ended by a budget breach rather than by the
    /// strategy finishing.
    pub breached: bool,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("non-terminating strategy: exceeded the safety cap of {cap} pulls")]
    NonTerminating { cap: u64 },
}

/// Derives the seed of one trial's random stream from a master seed.
///
/// Splitmix-style finalizer applied to
/// `master_seed + trial_index * 0x9E3779B97F4A7C15 (mod 2^64)`, so that
/// per-trial streams are decorrelated and independent of execution order.
pub fn child_seed(master_seed: u64, trial_index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Safety cap on the number of pulls of a single run.
///
/// Ten times the deterministic worst case `sum(C_l) / min(d)`; a strategy
/// still running past this point is treated as non-terminating.
pub fn pull_cap(instance: &InstanceSpec) -> u64 {
    let total_capacity: f64 = instance.capacities().iter().sum();
    let cap = 10.0 * (total_capacity / instance.min_mean_consumption());
    cap.ceil() as u64
}

/// Runs one trial of `strategy` on `instance`, drawing outcomes from `rng`.
///
/// The strategy must be freshly initialized. Two calls with equal seeds
/// produce identical records.
pub fn simulate<R: Rng + ?Sized>(
    instance: &InstanceSpec,
    strategy: &mut dyn Strategy,
    rng: &mut R,
) -> Result<TrialRecord, SimError> {
    let resources = instance.resource_count();
    let capacities = instance.capacities();
    let best = instance.best_arm();
    let cap = pull_cap(instance);

    let mut totals = vec![CompensatedSum::default(); resources];
    let mut pulls: u64 = 0;
    let mut attempts: u64 = 0;
    let report = |totals: &[CompensatedSum]| totals.iter().map(|t| t.value()).collect();

    loop {
        match strategy.select()? {
            Selection::Finished(arm) => {
                return Ok(TrialRecord {
                    recommended_arm: arm,
                    pulls,
                    total_consumption: report(&totals),
                    correct: arm == best,
                    breached: false,
                });
            }
            Selection::Pull(arm) => {
                if attempts >= cap {
                    return Err(SimError::NonTerminating { cap });
                }
                attempts += 1;
                let outcome = instance.sample_outcome(arm, rng)?;
                let breach = (0..resources)
                    .any(|l| totals[l].peek_add(outcome.consumptions[l]) > capacities[l]);
                if breach {
                    let arm = strategy.recommendation();
                    return Ok(TrialRecord {
                        recommended_arm: arm,
                        pulls,
                        total_consumption: report(&totals),
                        correct: arm == best,
                        breached: true,
                    });
                }
                for (total, &consumed) in totals.iter_mut().zip(&outcome.consumptions) {
                    total.add(consumed);
                }
                pulls += 1;
                strategy.observe(arm, &outcome)?;
            }
        }
    }
}
