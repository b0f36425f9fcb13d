//! Problem instances and outcome sampling.
//!
//! An instance describes `K` arms and `L` resource types. Pulling an arm
//! yields a random reward together with a consumption amount in `[0, 1]` for
//! every resource; the agent's total consumption of resource `l` must never
//! exceed the capacity `capacities[l]`. The latent means (`mean_reward`,
//! `mean_consumptions`) drive the simulation but are never revealed to a
//! strategy — strategies only see `(K, L, capacities)` plus sampled outcomes.
//!
//! Arms and resources are indexed from 0 throughout the crate and in all
//! file formats.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reward distribution of a single arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RewardModel {
    /// Bernoulli reward with the given mean; samples are 0 or 1.
    Bernoulli { mean: f64 },
    /// Gaussian reward with the given mean and unit variance.
    Gaussian { mean: f64 },
}

impl RewardModel {
    pub fn mean(&self) -> f64 {
        match *self {
            RewardModel::Bernoulli { mean } | RewardModel::Gaussian { mean } => mean,
        }
    }

    pub fn is_bernoulli(&self) -> bool {
        matches!(self, RewardModel::Bernoulli { .. })
    }
}

/// How the consumption vector of a pull is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConsumptionMode {
    /// Each pull of arm `k` consumes exactly `d[k][l]` units of resource `l`.
    #[serde(rename = "deterministic")]
    Deterministic,
    /// Each consumption is an independent Bernoulli draw with mean `d[k][l]`,
    /// independent of the reward and of the other resources.
    #[serde(rename = "bernoulli")]
    IndependentBernoulli,
    /// A single uniform draw `u` drives reward and all consumptions:
    /// `reward = 1 if u <= r`, `consumption[l] = 1 if u <= d[k][l]`.
    /// Requires Bernoulli rewards.
    #[serde(rename = "coupled")]
    CoupledUniform,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance must have at least one arm")]
    NoArms,
    #[error("instance must have at least one resource")]
    NoResources,
    #[error("capacity of resource {resource} must be positive, got {value}")]
    NonPositiveCapacity { resource: usize, value: f64 },
    #[error("mean consumption of arm {arm}, resource {resource} must lie in (0, 1], got {value}")]
    ConsumptionOutOfRange { arm: usize, resource: usize, value: f64 },
    #[error("Bernoulli reward mean of arm {arm} must lie in [0, 1], got {value}")]
    BernoulliMeanOutOfRange { arm: usize, value: f64 },
    #[error("reward mean of arm {arm} is not finite")]
    NonFiniteRewardMean { arm: usize },
    #[error("consumption row of arm {arm} has {got} entries, expected {expected}")]
    ConsumptionShape { arm: usize, expected: usize, got: usize },
    #[error("declared arm_count {declared} does not match {actual} reward entries")]
    ArmCountMismatch { declared: usize, actual: usize },
    #[error("declared resource_count {declared} does not match {actual} capacities")]
    ResourceCountMismatch { declared: usize, actual: usize },
    #[error("coupled consumption mode requires Bernoulli rewards (arm {arm} is Gaussian)")]
    CoupledRequiresBernoulli { arm: usize },
    #[error("arm index {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
}

/// One pull's observation: a reward and one consumption per resource.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub reward: f64,
    pub consumptions: Vec<f64>,
}

/// A validated problem instance.
///
/// Construction enforces the type invariants (positive capacities,
/// consumptions in `(0, 1]`, Bernoulli means in `[0, 1]`, coupled mode only
/// with Bernoulli rewards), so holders of an `InstanceSpec` can rely on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstanceSpec", into = "RawInstanceSpec")]
pub struct InstanceSpec {
    capacities: Vec<f64>,
    reward_models: Vec<RewardModel>,
    mean_consumptions: Vec<Vec<f64>>, // K rows of L entries
    consumption_mode: ConsumptionMode,
}

/// On-disk JSON schema for instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawInstanceSpec {
    arm_count: usize,
    resource_count: usize,
    capacities: Vec<f64>,
    rewards: Vec<RewardModel>,
    consumptions: Vec<Vec<f64>>,
    mode: ConsumptionMode,
}

impl TryFrom<RawInstanceSpec> for InstanceSpec {
    type Error = InstanceError;

    fn try_from(raw: RawInstanceSpec) -> Result<Self, InstanceError> {
        if raw.rewards.len() != raw.arm_count {
            return Err(InstanceError::ArmCountMismatch {
                declared: raw.arm_count,
                actual: raw.rewards.len(),
            });
        }
        if raw.capacities.len() != raw.resource_count {
            return Err(InstanceError::ResourceCountMismatch {
                declared: raw.resource_count,
                actual: raw.capacities.len(),
            });
        }
        InstanceSpec::new(raw.capacities, raw.rewards, raw.consumptions, raw.mode)
    }
}

impl From<InstanceSpec> for RawInstanceSpec {
    fn from(spec: InstanceSpec) -> Self {
        RawInstanceSpec {
            arm_count: spec.reward_models.len(),
            resource_count: spec.capacities.len(),
            capacities: spec.capacities,
            rewards: spec.reward_models,
            consumptions: spec.mean_consumptions,
            mode: spec.consumption_mode,
        }
    }
}

impl InstanceSpec {
    pub fn new(
        capacities: Vec<f64>,
        reward_models: Vec<RewardModel>,
        mean_consumptions: Vec<Vec<f64>>,
        consumption_mode: ConsumptionMode,
    ) -> Result<Self, InstanceError> {
        if reward_models.is_empty() {
            return Err(InstanceError::NoArms);
        }
        if capacities.is_empty() {
            return Err(InstanceError::NoResources);
        }
        for (l, &c) in capacities.iter().enumerate() {
            if !c.is_finite() || c <= 0.0 {
                return Err(InstanceError::NonPositiveCapacity { resource: l, value: c });
            }
        }
        for (k, model) in reward_models.iter().enumerate() {
            if !model.mean().is_finite() {
                return Err(InstanceError::NonFiniteRewardMean { arm: k });
            }
            if let RewardModel::Bernoulli { mean } = *model {
                if !(0.0..=1.0).contains(&mean) {
                    return Err(InstanceError::BernoulliMeanOutOfRange { arm: k, value: mean });
                }
            }
            if consumption_mode == ConsumptionMode::CoupledUniform && !model.is_bernoulli() {
                return Err(InstanceError::CoupledRequiresBernoulli { arm: k });
            }
        }
        if mean_consumptions.len() != reward_models.len() {
            return Err(InstanceError::ConsumptionShape {
                arm: mean_consumptions.len().min(reward_models.len()),
                expected: reward_models.len(),
                got: mean_consumptions.len(),
            });
        }
        for (k, row) in mean_consumptions.iter().enumerate() {
            if row.len() != capacities.len() {
                return Err(InstanceError::ConsumptionShape {
                    arm: k,
                    expected: capacities.len(),
                    got: row.len(),
                });
            }
            for (l, &d) in row.iter().enumerate() {
                if !(d > 0.0 && d <= 1.0) {
                    return Err(InstanceError::ConsumptionOutOfRange { arm: k, resource: l, value: d });
                }
            }
        }
        Ok(InstanceSpec { capacities, reward_models, mean_consumptions, consumption_mode })
    }

    pub fn arm_count(&self) -> usize {
        self.reward_models.len()
    }

    pub fn resource_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn reward_models(&self) -> &[RewardModel] {
        &self.reward_models
    }

    pub fn mean_reward(&self, arm: usize) -> f64 {
        self.reward_models[arm].mean()
    }

    /// Mean consumption of resource `resource` per pull of `arm`.
    pub fn mean_consumption(&self, arm: usize, resource: usize) -> f64 {
        self.mean_consumptions[arm][resource]
    }

    pub fn mean_consumptions(&self) -> &[Vec<f64>] {
        &self.mean_consumptions
    }

    /// Mean consumptions of one resource across all arms, in arm order.
    pub fn consumption_column(&self, resource: usize) -> Vec<f64> {
        self.mean_consumptions.iter().map(|row| row[resource]).collect()
    }

    pub fn consumption_mode(&self) -> ConsumptionMode {
        self.consumption_mode
    }

    /// Arm with the highest mean reward; the smallest index wins ties.
    pub fn best_arm(&self) -> usize {
        let mut best = 0;
        for k in 1..self.reward_models.len() {
            if self.reward_models[k].mean() > self.reward_models[best].mean() {
                best = k;
            }
        }
        best
    }

    /// Smallest mean consumption over all arms and resources.
    pub fn min_mean_consumption(&self) -> f64 {
        self.mean_consumptions
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Samples the outcome of pulling `arm` once.
    pub fn sample_outcome<R: Rng + ?Sized>(
        &self,
        arm: usize,
        rng: &mut R,
    ) -> Result<Outcome, InstanceError> {
        let arms = self.arm_count();
        if arm >= arms {
            return Err(InstanceError::ArmOutOfRange { arm, arms });
        }
        let row = &self.mean_consumptions[arm];
        let outcome = match self.consumption_mode {
            ConsumptionMode::Deterministic => Outcome {
                reward: self.sample_reward(arm, rng),
                consumptions: row.clone(),
            },
            ConsumptionMode::IndependentBernoulli => {
                let reward = self.sample_reward(arm, rng);
                let consumptions = row
                    .iter()
                    .map(|&d| {
                        let u: f64 = rng.random();
                        if u <= d { 1.0 } else { 0.0 }
                    })
                    .collect();
                Outcome { reward, consumptions }
            }
            ConsumptionMode::CoupledUniform => {
                let u: f64 = rng.random();
                let r = self.reward_models[arm].mean();
                Outcome {
                    reward: if u <= r { 1.0 } else { 0.0 },
                    consumptions: row.iter().map(|&d| if u <= d { 1.0 } else { 0.0 }).collect(),
                }
            }
        };
        Ok(outcome)
    }

    fn sample_reward<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        match self.reward_models[arm] {
            RewardModel::Bernoulli { mean } => {
                let u: f64 = rng.random();
                if u <= mean { 1.0 } else { 0.0 }
            }
            RewardModel::Gaussian { mean } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + z
            }
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
