//! Shared helpers for the integration suites.

use bairc_core::instance::{ConsumptionMode, InstanceSpec, RewardModel};
use rand::Rng;

/// Random instance with distinct reward means (unique best arm guaranteed),
/// arm count in `arms`, resource count in `resources`, capacities in
/// `(0, max_capacity]`, and any of the three consumption modes.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    arms: std::ops::RangeInclusive<usize>,
    resources: std::ops::RangeInclusive<usize>,
    max_capacity: f64,
) -> InstanceSpec {
    let k = rng.random_range(arms);
    let l = rng.random_range(resources);
    let mode = match rng.random_range(0..3u8) {
        0 => ConsumptionMode::Deterministic,
        1 => ConsumptionMode::IndependentBernoulli,
        _ => ConsumptionMode::CoupledUniform,
    };
    let capacities = (0..l).map(|_| rng.random_range(1.0..=max_capacity)).collect();
    // Distinct means via a random offset over a fixed grid, then shuffled.
    let mut means: Vec<f64> = (0..k).map(|i| 0.05 + 0.9 * (i as f64 / k as f64)).collect();
    for i in (1..means.len()).rev() {
        means.swap(i, rng.random_range(0..=i));
    }
    let rewards = means
        .into_iter()
        .map(|mean| {
            if mode != ConsumptionMode::CoupledUniform && rng.random::<f64>() < 0.3 {
                RewardModel::Gaussian { mean }
            } else {
                RewardModel::Bernoulli { mean }
            }
        })
        .collect();
    let consumptions = (0..k)
        .map(|_| (0..l).map(|_| rng.random_range(0.05..=1.0)).collect())
        .collect();
    InstanceSpec::new(capacities, rewards, consumptions, mode).expect("generated instance is valid")
}

/// Reward means with a unique maximum, for the pure complexity measures.
pub fn distinct_rewards<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut means: Vec<f64> = (0..k).map(|i| 0.02 + 0.96 * (i as f64 / k as f64)).collect();
    for i in (1..means.len()).rev() {
        means.swap(i, rng.random_range(0..=i));
    }
    means
}

/// Base rewards for the hard lower-bound family: `r_0 = 1/2` exactly and the
/// rest descending within `[1/4, 1/2)`. Values sit on a dyadic grid so that
/// the reward flip `1 - r` is exact in floating point — mathematically tied
/// hardness values then compare bitwise equal, keeping exact `>=` assertions
/// meaningful.
pub fn dyadic_lb_rewards<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    const GRID: f64 = 1048576.0; // 2^20
    let mut rewards = vec![0.5];
    for _ in 1..k {
        let m = rng.random_range(262_144..=513_802u64); // [0.25, ~0.49] * 2^20
        rewards.push(m as f64 / GRID);
    }
    rewards[1..].sort_by(|a, b| b.partial_cmp(a).unwrap());
    rewards
}
