//! Hardness measures, convergence-rate quantities, failure-probability
//! bounds, and the hard-instance families they are tight against.
//!
//! Conventions: all logarithms are natural unless a quantity is explicitly
//! base-2 (`log2`); reward gaps are taken against the unique best arm with
//! the runner-up gap duplicated into slot 0; consumption vectors are sorted
//! descending inside the `h*` measures (worst case over arm/consumption
//! pairings), while the `tilde_*` refinements keep the per-arm pairing in
//! best-to-worst reward order. Bounds above 1 are returned as-is — a vacuous
//! value is information about where the theory stops helping, so it is not
//! clamped.

use crate::instance::{ConsumptionMode, InstanceError, InstanceSpec, RewardModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexityError {
    #[error("no unique best arm: the two largest reward means are equal ({0})")]
    NoUniqueBestArm(f64),
    #[error("at least two arms are required, got {0}")]
    TooFewArms(usize),
    #[error("effective consumption is defined on (0, 1], got {0}")]
    ConsumptionDomain(f64),
    #[error("got {capacities} capacities but {values} per-resource values")]
    LengthMismatch { capacities: usize, values: usize },
    #[error("deterministic-consumption bound requested for a {0:?} instance")]
    RequiresDeterministic(ConsumptionMode),
    #[error("lower-bound family requires r_1 = 1/2 >= ... >= r_K >= 1/4, violated at position {0}")]
    RewardLadder(usize),
    #[error("lower-bound family requires descending consumptions in (0, 1], violated at resource {resource}, position {position}")]
    ConsumptionLadder { resource: usize, position: usize },
    #[error("flip index {index} out of range for {arms} arms")]
    FlipIndex { index: usize, arms: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Reward gaps in best-to-worst order: `gap[0] = gap[1] = r(1) - r(2)` and
/// `gap[k] = r(1) - r(k+1)` beyond, where `r(1) >= r(2) >= ...` is the
/// descending sort of the means. Errors when the maximum is not unique.
pub fn gaps(rewards: &[f64]) -> Result<Vec<f64>, ComplexityError> {
    if rewards.len() < 2 {
        return Err(ComplexityError::TooFewArms(rewards.len()));
    }
    let mut sorted = rewards.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    if sorted[0] == sorted[1] {
        return Err(ComplexityError::NoUniqueBestArm(sorted[0]));
    }
    let best = sorted[0];
    let mut out: Vec<f64> = sorted.iter().map(|&r| best - r).collect();
    out[0] = out[1];
    Ok(out)
}

fn descending(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sorted
}

/// `max_{k >= 2} (sum of the k largest consumptions) / gap_k^2`.
pub fn h2_det(rewards: &[f64], consumptions: &[f64]) -> Result<f64, ComplexityError> {
    let gap = gaps(rewards)?;
    Ok(worst_prefix_ratio(&descending(consumptions), &gap))
}

/// `h2_det` with every consumption replaced by its effective value `f(d)`.
pub fn h2_sto(rewards: &[f64], consumptions: &[f64]) -> Result<f64, ComplexityError> {
    let gap = gaps(rewards)?;
    let effective = descending(consumptions)
        .into_iter()
        .map(f_effective)
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(worst_prefix_ratio(&effective, &gap))
}

fn worst_prefix_ratio(sorted_desc: &[f64], gap: &[f64]) -> f64 {
    let mut prefix = sorted_desc[0];
    let mut worst = f64::NEG_INFINITY;
    for k in 1..sorted_desc.len() {
        prefix += sorted_desc[k];
        worst = worst.max(prefix / (gap[k] * gap[k]));
    }
    worst
}

/// Effective consumption of a random `[0, 1]` draw with mean `d`:
/// `e^2 * d` for `d >= e^-2`, else `2 / ln(1/d)`. Continuous and increasing,
/// with range `(0, e^2]`, and `f(d) > d` everywhere.
pub fn f_effective(d: f64) -> Result<f64, ComplexityError> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(ComplexityError::ConsumptionDomain(d));
    }
    let knee = (-2.0f64).exp();
    Ok(if d >= knee { (2.0f64).exp() * d } else { 2.0 / -d.ln() })
}

/// `sum_k d(k) / gap_k^2` with consumptions sorted descending and gaps in
/// best-to-worst reward order.
pub fn h1_det(rewards: &[f64], consumptions: &[f64]) -> Result<f64, ComplexityError> {
    let gap = gaps(rewards)?;
    let sorted = descending(consumptions);
    Ok(sorted.iter().zip(&gap).map(|(&d, &g)| d / (g * g)).sum())
}

/// Refined measures that keep each arm's own consumption instead of the
/// worst-case descending pairing. Arms are ordered best-to-worst by reward
/// (ties below the top broken by input position), and the per-arm
/// consumptions follow that order.
pub fn tilde_h_det(rewards: &[f64], consumptions: &[f64]) -> Result<(f64, f64), ComplexityError> {
    let gap = gaps(rewards)?;
    if consumptions.len() != rewards.len() {
        return Err(ComplexityError::LengthMismatch {
            capacities: rewards.len(),
            values: consumptions.len(),
        });
    }
    let mut order: Vec<usize> = (0..rewards.len()).collect();
    order.sort_by(|&a, &b| {
        rewards[b].partial_cmp(&rewards[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let paired: Vec<f64> = order.iter().map(|&i| consumptions[i]).collect();
    let tilde_h1 = paired.iter().zip(&gap).map(|(&d, &g)| d / (g * g)).sum();
    let tilde_h2 = worst_prefix_ratio(&paired, &gap);
    Ok((tilde_h1, tilde_h2))
}

/// Bottleneck rate `min_l C_l / H_l`.
pub fn gamma(capacities: &[f64], h_values: &[f64]) -> Result<f64, ComplexityError> {
    if capacities.len() != h_values.len() {
        return Err(ComplexityError::LengthMismatch {
            capacities: capacities.len(),
            values: h_values.len(),
        });
    }
    Ok(capacities
        .iter()
        .zip(h_values)
        .map(|(&c, &h)| c / h)
        .fold(f64::INFINITY, f64::min))
}

fn per_resource<F>(instance: &InstanceSpec, measure: F) -> Result<Vec<f64>, ComplexityError>
where
    F: Fn(&[f64], &[f64]) -> Result<f64, ComplexityError>,
{
    let rewards: Vec<f64> = instance.reward_models().iter().map(|m| m.mean()).collect();
    (0..instance.resource_count())
        .map(|l| measure(&rewards, &instance.consumption_column(l)))
        .collect()
}

/// Failure-probability bound of the rationed halving strategy under
/// deterministic consumption:
/// `ceil(log2 K) * K * exp(-gamma_det / (4 ceil(log2 K)))`.
///
/// A single arm cannot fail, so `K = 1` yields 0. Requires a
/// deterministic-consumption instance.
pub fn thm1_bound(instance: &InstanceSpec) -> Result<f64, ComplexityError> {
    if instance.consumption_mode() != ConsumptionMode::Deterministic {
        return Err(ComplexityError::RequiresDeterministic(instance.consumption_mode()));
    }
    let k = instance.arm_count();
    if k == 1 {
        return Ok(0.0);
    }
    let phases = f64::from(crate::strategy::ceil_log2(k));
    let rate = gamma(instance.capacities(), &per_resource(instance, h2_det)?)?;
    Ok(phases * k as f64 * (-rate / (4.0 * phases)).exp())
}

/// Failure-probability bound under stochastic consumption:
/// `7 * L * K * log2(K) * exp(-gamma_sto / (8 ceil(log2 K)))`.
pub fn thm2_bound(instance: &InstanceSpec) -> Result<f64, ComplexityError> {
    let k = instance.arm_count();
    if k == 1 {
        return Ok(0.0);
    }
    let phases = f64::from(crate::strategy::ceil_log2(k));
    let rate = gamma(instance.capacities(), &per_resource(instance, h2_sto)?)?;
    let l = instance.resource_count() as f64;
    Ok(7.0 * l * k as f64 * (k as f64).log2() * (-rate / (8.0 * phases)).exp())
}

/// Everything the analysis derives from one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub arm_count: usize,
    pub resource_count: usize,
    pub consumption_mode: ConsumptionMode,
    /// Reward gaps in best-to-worst order (slot 0 duplicates the runner-up
    /// gap); empty for a single arm.
    pub gaps: Vec<f64>,
    /// Per-resource consumptions sorted descending.
    pub sorted_consumptions: Vec<Vec<f64>>,
    pub h2_det: Option<Vec<f64>>,
    pub h2_sto: Option<Vec<f64>>,
    pub h1_det: Option<Vec<f64>>,
    pub tilde_h1_det: Option<Vec<f64>>,
    pub tilde_h2_det: Option<Vec<f64>>,
    pub gamma_det: Option<f64>,
    pub gamma_sto: Option<f64>,
    /// `None` when the instance's consumption is not deterministic (the
    /// bound's premise) — except for `K = 1`, where failure is impossible
    /// and the bound is 0 regardless.
    pub thm1_bound: Option<f64>,
    pub thm2_bound: f64,
}

impl ComplexityReport {
    pub fn for_instance(instance: &InstanceSpec) -> Result<Self, ComplexityError> {
        let k = instance.arm_count();
        let deterministic = instance.consumption_mode() == ConsumptionMode::Deterministic;
        let sorted_consumptions: Vec<Vec<f64>> = (0..instance.resource_count())
            .map(|l| descending(&instance.consumption_column(l)))
            .collect();
        if k == 1 {
            return Ok(ComplexityReport {
                arm_count: 1,
                resource_count: instance.resource_count(),
                consumption_mode: instance.consumption_mode(),
                gaps: vec![],
                sorted_consumptions,
                h2_det: None,
                h2_sto: None,
                h1_det: None,
                tilde_h1_det: None,
                tilde_h2_det: None,
                gamma_det: None,
                gamma_sto: None,
                thm1_bound: Some(0.0),
                thm2_bound: 0.0,
            });
        }
        let rewards: Vec<f64> = instance.reward_models().iter().map(|m| m.mean()).collect();
        let h2d = per_resource(instance, h2_det)?;
        let h2s = per_resource(instance, h2_sto)?;
        let h1d = per_resource(instance, h1_det)?;
        let mut tilde1 = Vec::with_capacity(instance.resource_count());
        let mut tilde2 = Vec::with_capacity(instance.resource_count());
        for l in 0..instance.resource_count() {
            let (t1, t2) = tilde_h_det(&rewards, &instance.consumption_column(l))?;
            tilde1.push(t1);
            tilde2.push(t2);
        }
        let gamma_det = gamma(instance.capacities(), &h2d)?;
        let gamma_sto = gamma(instance.capacities(), &h2s)?;
        Ok(ComplexityReport {
            arm_count: k,
            resource_count: instance.resource_count(),
            consumption_mode: instance.consumption_mode(),
            gaps: gaps(&rewards)?,
            sorted_consumptions,
            h2_det: Some(h2d),
            h2_sto: Some(h2s),
            h1_det: Some(h1d),
            tilde_h1_det: Some(tilde1),
            tilde_h2_det: Some(tilde2),
            gamma_det: Some(gamma_det),
            gamma_sto: Some(gamma_sto),
            thm1_bound: if deterministic { Some(thm1_bound(instance)?) } else { None },
            thm2_bound: thm2_bound(instance)?,
        })
    }
}

fn check_lb_preconditions(
    base_rewards: &[f64],
    sorted_consumptions: &[Vec<f64>],
    flip_index: usize,
) -> Result<(), ComplexityError> {
    let k = base_rewards.len();
    if k < 2 {
        return Err(ComplexityError::TooFewArms(k));
    }
    if base_rewards[0] != 0.5 {
        return Err(ComplexityError::RewardLadder(0));
    }
    for i in 0..k {
        if base_rewards[i] < 0.25
            || base_rewards[i] > 0.5
            || (i > 0 && base_rewards[i] > base_rewards[i - 1])
        {
            return Err(ComplexityError::RewardLadder(i));
        }
    }
    for (l, row) in sorted_consumptions.iter().enumerate() {
        if row.len() != k {
            return Err(ComplexityError::LengthMismatch { capacities: k, values: row.len() });
        }
        for i in 0..k {
            if !(row[i] > 0.0 && row[i] <= 1.0) || (i > 0 && row[i] > row[i - 1]) {
                return Err(ComplexityError::ConsumptionLadder { resource: l, position: i });
            }
        }
    }
    if flip_index >= k {
        return Err(ComplexityError::FlipIndex { index: flip_index, arms: k });
    }
    Ok(())
}

/// Per-arm consumption of the hard family: arms 0 and 1 swap the two
/// largest sorted values, the rest keep their rank. Identical across all
/// flip indices, so consumption reveals nothing about which arm is best.
fn lb_consumption_rows(sorted_consumptions: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|arm| {
            sorted_consumptions
                .iter()
                .map(|row| match arm {
                    0 => row[1],
                    1 => row[0],
                    _ => row[arm],
                })
                .collect()
        })
        .collect()
}

fn flipped_rewards(base_rewards: &[f64], flip_index: usize) -> Vec<f64> {
    base_rewards
        .iter()
        .enumerate()
        .map(|(k, &r)| if k == flip_index { 1.0 - r } else { r })
        .collect()
}

/// Hard-family instance with deterministic consumption and Bernoulli
/// rewards: arm `flip_index` has its mean flipped to `1 - r`, making it the
/// unique best arm (flip index 0 is the fixed point `r_1 = 1/2`).
pub fn build_det_lb_instance(
    base_rewards: &[f64],
    sorted_consumptions: &[Vec<f64>],
    flip_index: usize,
    capacities: &[f64],
) -> Result<InstanceSpec, ComplexityError> {
    check_lb_preconditions(base_rewards, sorted_consumptions, flip_index)?;
    let rewards = flipped_rewards(base_rewards, flip_index)
        .into_iter()
        .map(|mean| RewardModel::Bernoulli { mean })
        .collect();
    let rows = lb_consumption_rows(sorted_consumptions, base_rewards.len());
    Ok(InstanceSpec::new(
        capacities.to_vec(),
        rewards,
        rows,
        ConsumptionMode::Deterministic,
    )?)
}

/// Stochastic counterpart: unit-variance Gaussian rewards and independent
/// Bernoulli consumption with the same flipped/swapped means.
pub fn build_sto_lb_instance(
    base_rewards: &[f64],
    sorted_consumptions: &[Vec<f64>],
    flip_index: usize,
    capacities: &[f64],
) -> Result<InstanceSpec, ComplexityError> {
    check_lb_preconditions(base_rewards, sorted_consumptions, flip_index)?;
    let rewards = flipped_rewards(base_rewards, flip_index)
        .into_iter()
        .map(|mean| RewardModel::Gaussian { mean })
        .collect();
    let rows = lb_consumption_rows(sorted_consumptions, base_rewards.len());
    Ok(InstanceSpec::new(
        capacities.to_vec(),
        rewards,
        rows,
        ConsumptionMode::IndependentBernoulli,
    )?)
}

/// Single-resource family on which the refined (unsorted) measures stay
/// bounded while the arm count grows: `d_0 = 2^-(K-2)`, `d_k = 2^-(K-1-k)`
/// for `k >= 1`, `r_0 = 1/2`, `r_k = 1/2 - 2^((k-K-3)/2)` (so the worst arm
/// sits exactly at 1/4). Deterministic consumption, Bernoulli rewards.
///
/// Its refined measures evaluate exactly: `tilde_h2 = 32` for every `K` and
/// `tilde_h1 = 16 K`.
pub fn build_counterexample(
    arm_count: usize,
    capacity: f64,
) -> Result<InstanceSpec, ComplexityError> {
    if arm_count < 2 {
        return Err(ComplexityError::TooFewArms(arm_count));
    }
    let k = arm_count as i32;
    let mut rewards = Vec::with_capacity(arm_count);
    let mut rows = Vec::with_capacity(arm_count);
    rewards.push(RewardModel::Bernoulli { mean: 0.5 });
    rows.push(vec![f64::exp2(f64::from(2 - k))]);
    for arm in 2..=k {
        rewards.push(RewardModel::Bernoulli {
            mean: 0.5 - f64::exp2(f64::from(arm - k - 4) / 2.0),
        });
        rows.push(vec![f64::exp2(f64::from(arm - k))]);
    }
    Ok(InstanceSpec::new(vec![capacity], rewards, rows, ConsumptionMode::Deterministic)?)
}
