//! Config-driven Monte Carlo experiments: synthetic instance generation,
//! seeded parallel trials, aggregation with score intervals, and CSV/JSON
//! file formats.
//!
//! Determinism contract: trial `i` always runs on the stream seeded with
//! `child_seed(master_seed, i)`, and aggregation folds the per-trial records
//! in trial order. Results are therefore identical whatever the worker
//! thread count, and repeated runs produce byte-identical output files.

use crate::baselines::{
    AtLucbStrategy, BaselineParams, DshStrategy, ParamsError, UcbStrategy, UniformStrategy,
};
use crate::complexity::{f_effective, ComplexityError};
use crate::instance::{ConsumptionMode, InstanceError, InstanceSpec, RewardModel};
use crate::shrr::ShrrStrategy;
use crate::sim::{child_seed, simulate, SimError, TrialRecord};
use crate::strategy::Strategy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("the mixture consumption pattern requires exactly 2 resources, got {0}")]
    MixtureNeedsTwoResources(usize),
    #[error("half-split consumption patterns require an even arm count, got {0}")]
    OddArmCount(usize),
    #[error("synthetic instances need at least two arms, got {0}")]
    TooFewArms(usize),
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("strategy list must not be empty")]
    EmptyStrategies,
    #[error("config must set exactly one of `instance` and `instance_path`")]
    AmbiguousInstance,
    #[error("invalid interval counts: failures {failures} over {trials} trials")]
    InvalidCounts { failures: u64, trials: u64 },
    #[error("lemma check requires d strictly inside (0, 1), got {0}")]
    LemmaDomain(f64),
    #[error("lemma check requires draws_per_rep >= 1 and repetitions >= 1")]
    LemmaCounts,
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Schema { path: String, source: serde_json::Error },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Reward shapes of the synthetic benchmark catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardProfile {
    /// Best arm at 0.9, every other arm at 0.8.
    OneGroup,
    /// Best at 0.9, the next `ceil(K/8) - 1` arms at 0.8, the rest at 0.1.
    Trap,
    /// `r_i = 0.9 (1 - sqrt(i / K))` for `i >= 2` (1-based), best at 0.9.
    Polynomial,
    /// Geometric decay from 0.9 down to 0.1.
    Geometric,
}

/// How mean consumption lines up with mean reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchPattern {
    /// High-reward half consumes 0.9, low-reward half 0.1, on every resource.
    HmH,
    /// High-reward half consumes 0.1, low-reward half 0.9, on every resource.
    HmL,
    /// Two resources: resource 0 follows HmL, resource 1 follows HmH.
    Mixture,
}

/// Consumption variability of the synthetic catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariabilityMode {
    Deterministic,
    /// Random and driven by the same uniform draw as the reward.
    Correlated,
    /// Random and independent of the reward.
    Uncorrelated,
}

impl VariabilityMode {
    fn consumption_mode(self) -> ConsumptionMode {
        match self {
            VariabilityMode::Deterministic => ConsumptionMode::Deterministic,
            VariabilityMode::Correlated => ConsumptionMode::CoupledUniform,
            VariabilityMode::Uncorrelated => ConsumptionMode::IndependentBernoulli,
        }
    }
}

/// Builds a synthetic instance from the benchmark catalog: `arm_count` arms,
/// `resource_count` resources, each with capacity `budget`.
pub fn gen_synthetic(
    arm_count: usize,
    resource_count: usize,
    profile: RewardProfile,
    pattern: MatchPattern,
    mode: VariabilityMode,
    budget: f64,
) -> Result<InstanceSpec, HarnessError> {
    if arm_count < 2 {
        return Err(HarnessError::TooFewArms(arm_count));
    }
    if !arm_count.is_multiple_of(2) {
        return Err(HarnessError::OddArmCount(arm_count));
    }
    if pattern == MatchPattern::Mixture && resource_count != 2 {
        return Err(HarnessError::MixtureNeedsTwoResources(resource_count));
    }
    let k = arm_count as f64;
    let rewards: Vec<f64> = (1..=arm_count)
        .map(|i| match profile {
            RewardProfile::OneGroup => {
                if i == 1 {
                    0.9
                } else {
                    0.8
                }
            }
            RewardProfile::Trap => {
                if i == 1 {
                    0.9
                } else if i <= arm_count.div_ceil(8) {
                    0.8
                } else {
                    0.1
                }
            }
            RewardProfile::Polynomial => {
                if i == 1 {
                    0.9
                } else {
                    0.9 * (1.0 - (i as f64 / k).sqrt())
                }
            }
            RewardProfile::Geometric => {
                0.9 * (1.0f64 / 9.0).powf((i - 1) as f64 / (k - 1.0))
            }
        })
        .collect();

    let half = arm_count / 2;
    let column = |high_first: bool, i: usize| -> f64 {
        let in_first_half = i <= half;
        if in_first_half == high_first {
            0.9
        } else {
            0.1
        }
    };
    let consumptions: Vec<Vec<f64>> = (1..=arm_count)
        .map(|i| {
            (0..resource_count)
                .map(|l| match pattern {
                    MatchPattern::HmH => column(true, i),
                    MatchPattern::HmL => column(false, i),
                    MatchPattern::Mixture => column(l == 1, i),
                })
                .collect()
        })
        .collect();

    let reward_models = rewards.into_iter().map(|mean| RewardModel::Bernoulli { mean }).collect();
    Ok(InstanceSpec::new(
        vec![budget; resource_count],
        reward_models,
        consumptions,
        mode.consumption_mode(),
    )?)
}

/// Names of the runnable strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Shrr,
    Uniform,
    Ucb,
    Atlucb,
    Dsh,
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StrategyName::Shrr => "shrr",
            StrategyName::Uniform => "uniform",
            StrategyName::Ucb => "ucb",
            StrategyName::Atlucb => "atlucb",
            StrategyName::Dsh => "dsh",
        };
        f.write_str(name)
    }
}

/// One strategy entry of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub name: StrategyName,
    #[serde(default)]
    pub params: BaselineParams,
}

/// Builds a fresh strategy from the public instance data: arm count,
/// capacities, and whether the consumption setting is deterministic (the
/// rationed halving strategy exploits known consumption when it is).
pub fn make_strategy(
    name: StrategyName,
    params: &BaselineParams,
    arm_count: usize,
    capacities: &[f64],
    deterministic_consumption: bool,
) -> Box<dyn Strategy> {
    match name {
        StrategyName::Shrr if deterministic_consumption => {
            Box::new(ShrrStrategy::with_deterministic_consumption(arm_count, capacities))
        }
        StrategyName::Shrr => Box::new(ShrrStrategy::new(arm_count, capacities)),
        StrategyName::Uniform => Box::new(UniformStrategy::new(arm_count)),
        StrategyName::Ucb => Box::new(UcbStrategy::new(arm_count, params.ucb_exploration)),
        StrategyName::Atlucb => Box::new(AtLucbStrategy::new(
            arm_count,
            params.atlucb_delta1,
            params.atlucb_alpha,
            params.atlucb_epsilon,
        )),
        StrategyName::Dsh => Box::new(DshStrategy::new(arm_count, params.dsh_budget_for(arm_count))),
    }
}

/// A full experiment description; see the README for the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_path: Option<String>,
    pub strategies: Vec<StrategySpec>,
    pub trials: u64,
    pub master_seed: u64,
    pub output_path: String,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::ZeroTrials);
        }
        if self.strategies.is_empty() {
            return Err(HarnessError::EmptyStrategies);
        }
        if self.instance.is_some() == self.instance_path.is_some() {
            return Err(HarnessError::AmbiguousInstance);
        }
        for spec in &self.strategies {
            spec.params.validate()?;
        }
        Ok(())
    }

    /// The inline instance, or the one loaded from `instance_path`.
    pub fn load_instance(&self) -> Result<InstanceSpec, HarnessError> {
        match (&self.instance, &self.instance_path) {
            (Some(instance), None) => Ok(instance.clone()),
            (None, Some(path)) => read_instance(path),
            _ => Err(HarnessError::AmbiguousInstance),
        }
    }
}

/// Aggregated outcome of one strategy over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub strategy: String,
    pub trials: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub mean_pulls: f64,
    pub mean_consumption: Vec<f64>,
    pub master_seed: u64,
    /// Trials ended by a budget breach (not a CSV column; rationed halving
    /// keeps this at zero by construction).
    pub breached_trials: u64,
}

/// Runs `trials` seeded simulations of one strategy; records come back in
/// trial order regardless of parallelism.
pub fn run_strategy_trials(
    instance: &InstanceSpec,
    name: StrategyName,
    params: &BaselineParams,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<TrialRecord>, SimError> {
    let deterministic = instance.consumption_mode() == ConsumptionMode::Deterministic;
    let one_trial = |trial: u64| -> Result<TrialRecord, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(master_seed, trial));
        let mut strategy = make_strategy(
            name,
            params,
            instance.arm_count(),
            instance.capacities(),
            deterministic,
        );
        simulate(instance, strategy.as_mut(), &mut rng)
    };
    #[cfg(feature = "parallel")]
    {
        (0..trials).into_par_iter().map(one_trial).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(one_trial).collect()
    }
}

fn aggregate(
    name: StrategyName,
    records: &[TrialRecord],
    resource_count: usize,
    master_seed: u64,
) -> AggregateResult {
    let trials = records.len() as u64;
    let failures = records.iter().filter(|r| !r.correct).count() as u64;
    let breached_trials = records.iter().filter(|r| r.breached).count() as u64;
    let mut mean_consumption = vec![0.0f64; resource_count];
    let mut mean_pulls = 0.0f64;
    for record in records {
        mean_pulls += record.pulls as f64;
        for (mean, total) in mean_consumption.iter_mut().zip(&record.total_consumption) {
            *mean += total;
        }
    }
    mean_pulls /= trials as f64;
    for value in &mut mean_consumption {
        *value /= trials as f64;
    }
    let (wilson_lo, wilson_hi) =
        wilson_interval(failures, trials, 1.96).expect("counts are consistent");
    AggregateResult {
        strategy: name.to_string(),
        trials,
        failures,
        failure_rate: failures as f64 / trials as f64,
        wilson_lo,
        wilson_hi,
        mean_pulls,
        mean_consumption,
        master_seed,
        breached_trials,
    }
}

/// Runs every strategy of the config and aggregates per strategy.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<AggregateResult>, HarnessError> {
    config.validate()?;
    let instance = config.load_instance()?;
    let mut results = Vec::with_capacity(config.strategies.len());
    for spec in &config.strategies {
        let records = run_strategy_trials(
            &instance,
            spec.name,
            &spec.params,
            config.trials,
            config.master_seed,
        )?;
        results.push(aggregate(
            spec.name,
            &records,
            instance.resource_count(),
            config.master_seed,
        ));
    }
    Ok(results)
}

/// Wilson score interval for a binomial proportion, clamped to `[0, 1]`.
pub fn wilson_interval(
    failures: u64,
    trials: u64,
    z: f64,
) -> Result<(f64, f64), HarnessError> {
    if trials == 0 || failures > trials {
        return Err(HarnessError::InvalidCounts { failures, trials });
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denominator = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denominator;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denominator;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Monte Carlo check of the consumption concentration bound: the chance that
/// the mean of `draws_per_rep` Bernoulli(`d`) samples exceeds the effective
/// consumption `f(d)` is at most `exp(-draws_per_rep / 3)`.
///
/// Returns `(empirical_probability, bound)`. The check passes when the
/// empirical probability is within three standard errors above the bound,
/// see [`lemma_check_passes`].
pub fn mc_check_consumption_lemma<R: Rng + ?Sized>(
    d: f64,
    draws_per_rep: u64,
    repetitions: u64,
    rng: &mut R,
) -> Result<(f64, f64), HarnessError> {
    if !(d > 0.0 && d < 1.0) {
        return Err(HarnessError::LemmaDomain(d));
    }
    if draws_per_rep == 0 || repetitions == 0 {
        return Err(HarnessError::LemmaCounts);
    }
    let threshold = f_effective(d)?;
    let mut exceedances = 0u64;
    for _ in 0..repetitions {
        let mut sum = 0u64;
        for _ in 0..draws_per_rep {
            let u: f64 = rng.random();
            if u <= d {
                sum += 1;
            }
        }
        if sum as f64 / draws_per_rep as f64 > threshold {
            exceedances += 1;
        }
    }
    let bound = (-(draws_per_rep as f64) / 3.0).exp();
    Ok((exceedances as f64 / repetitions as f64, bound))
}

/// Acceptance rule for the lemma check: empirical probability at most the
/// bound plus three standard errors of a rate at the bound.
pub fn lemma_check_passes(empirical: f64, bound: f64, repetitions: u64) -> bool {
    empirical <= bound + 3.0 * (bound / repetitions as f64).sqrt()
}

/// Which consumption setting a comparison row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsumptionSetting {
    Det,
    Sto,
}

impl fmt::Display for ConsumptionSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsumptionSetting::Det => "det",
            ConsumptionSetting::Sto => "sto",
        })
    }
}

/// One point of the deterministic-vs-stochastic comparison curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub d: f64,
    pub setting: ConsumptionSetting,
    pub trials: u64,
    pub failures: u64,
    /// Natural log of the failure rate; `-inf` when no trial failed.
    pub log_failure_rate: f64,
}

/// The two-arm comparison family: rewards Bernoulli(0.5)/Bernoulli(0.4),
/// a single resource with capacity 2, and mean consumption `d` on both arms
/// — consumed either deterministically or as Bernoulli(`d`) draws.
pub fn comparison_instance(
    d: f64,
    setting: ConsumptionSetting,
) -> Result<InstanceSpec, HarnessError> {
    let mode = match setting {
        ConsumptionSetting::Det => ConsumptionMode::Deterministic,
        ConsumptionSetting::Sto => ConsumptionMode::IndependentBernoulli,
    };
    Ok(InstanceSpec::new(
        vec![2.0],
        vec![RewardModel::Bernoulli { mean: 0.5 }, RewardModel::Bernoulli { mean: 0.4 }],
        vec![vec![d], vec![d]],
        mode,
    )?)
}

/// Runs the rationed-halving strategy on the comparison family for every
/// `d`, under both consumption settings, `trials` trials each.
pub fn figure_compare(
    d_values: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<FigureRow>, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::ZeroTrials);
    }
    let params = BaselineParams::default();
    let mut rows = Vec::with_capacity(d_values.len() * 2);
    for (point, &d) in d_values.iter().enumerate() {
        for (offset, setting) in
            [ConsumptionSetting::Det, ConsumptionSetting::Sto].into_iter().enumerate()
        {
            let instance = comparison_instance(d, setting)?;
            let seed = child_seed(master_seed, (point * 2 + offset) as u64);
            let records =
                run_strategy_trials(&instance, StrategyName::Shrr, &params, trials, seed)?;
            let failures = records.iter().filter(|r| !r.correct).count() as u64;
            rows.push(FigureRow {
                d,
                setting,
                trials,
                failures,
                log_failure_rate: (failures as f64 / trials as f64).ln(),
            });
        }
    }
    Ok(rows)
}

/// Renders aggregate results as CSV with the fixed column set
/// `strategy,trials,failures,failure_rate,wilson_lo,wilson_hi,mean_pulls,`
/// `mean_consumption_1..L,master_seed`.
pub fn results_to_csv(results: &[AggregateResult]) -> String {
    let resources = results.first().map_or(0, |r| r.mean_consumption.len());
    let mut out = String::from("strategy,trials,failures,failure_rate,wilson_lo,wilson_hi,mean_pulls");
    for l in 1..=resources {
        out.push_str(&format!(",mean_consumption_{l}"));
    }
    out.push_str(",master_seed\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}",
            r.strategy, r.trials, r.failures, r.failure_rate, r.wilson_lo, r.wilson_hi,
            r.mean_pulls
        ));
        for value in &r.mean_consumption {
            out.push_str(&format!(",{value}"));
        }
        out.push_str(&format!(",{}\n", r.master_seed));
    }
    out
}

/// Renders comparison rows as CSV: `d,setting,trials,failures,log_failure_rate`.
pub fn figure_rows_to_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from("d,setting,trials,failures,log_failure_rate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.d, r.setting, r.trials, r.failures, r.log_failure_rate
        ));
    }
    out
}

pub fn write_results(results: &[AggregateResult], path: &str) -> Result<(), HarnessError> {
    write_text(path, &results_to_csv(results))
}

pub fn write_text(path: &str, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text)
        .map_err(|source| HarnessError::Io { path: path.to_string(), source })
}

pub fn read_config(path: &str) -> Result<ExperimentConfig, HarnessError> {
    let text = read_file(path)?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|source| HarnessError::Schema { path: path.to_string(), source })?;
    config.validate()?;
    Ok(config)
}

pub fn read_instance(path: &str) -> Result<InstanceSpec, HarnessError> {
    let text = read_file(path)?;
    InstanceSpec::from_json(&text)
        .map_err(|source| HarnessError::Schema { path: path.to_string(), source })
}

fn read_file(path: &str) -> Result<String, HarnessError> {
    std::fs::read_to_string(Path::new(path))
        .map_err(|source| HarnessError::Io { path: path.to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn onegroup_hml_catalog_values() {
        let inst = gen_synthetic(
            256,
            1,
            RewardProfile::OneGroup,
            MatchPattern::HmL,
            VariabilityMode::Deterministic,
            1500.0,
        )
        .unwrap();
        assert_eq!(inst.mean_reward(0), 0.9);
        assert_eq!(inst.mean_reward(1), 0.8);
        assert_eq!(inst.mean_reward(255), 0.8);
        assert_eq!(inst.mean_consumption(0, 0), 0.1);
        assert_eq!(inst.mean_consumption(127, 0), 0.1);
        assert_eq!(inst.mean_consumption(128, 0), 0.9);
        assert_eq!(inst.capacities(), &[1500.0]);
    }

    #[test]
    fn geometric_profile_endpoints() {
        let inst = gen_synthetic(
            256,
            1,
            RewardProfile::Geometric,
            MatchPattern::HmH,
            VariabilityMode::Uncorrelated,
            1500.0,
        )
        .unwrap();
        assert!((inst.mean_reward(0) - 0.9).abs() < 1e-12);
        assert!((inst.mean_reward(255) - 0.1).abs() < 1e-12);
        assert_eq!(inst.consumption_mode(), ConsumptionMode::IndependentBernoulli);
    }

    #[test]
    fn polynomial_profile_small_k() {
        let inst = gen_synthetic(
            4,
            1,
            RewardProfile::Polynomial,
            MatchPattern::HmH,
            VariabilityMode::Deterministic,
            10.0,
        )
        .unwrap();
        assert_eq!(inst.mean_reward(0), 0.9);
        assert!((inst.mean_reward(1) - 0.9 * (1.0 - (0.5f64).sqrt())).abs() < 1e-15);
        assert!((inst.mean_reward(2) - 0.9 * (1.0 - (0.75f64).sqrt())).abs() < 1e-15);
        assert_eq!(inst.mean_reward(3), 0.0);
    }

    #[test]
    fn trap_profile_scales_with_k() {
        let inst = gen_synthetic(
            16,
            1,
            RewardProfile::Trap,
            MatchPattern::HmH,
            VariabilityMode::Deterministic,
            100.0,
        )
        .unwrap();
        // ceil(16/8) = 2: best arm plus one near-optimal arm.
        assert_eq!(inst.mean_reward(0), 0.9);
        assert_eq!(inst.mean_reward(1), 0.8);
        assert_eq!(inst.mean_reward(2), 0.1);
        assert_eq!(inst.mean_reward(15), 0.1);
    }

    #[test]
    fn mixture_pattern_opposes_the_two_resources() {
        let inst = gen_synthetic(
            8,
            2,
            RewardProfile::OneGroup,
            MatchPattern::Mixture,
            VariabilityMode::Correlated,
            50.0,
        )
        .unwrap();
        // Resource 0: HmL (first half cheap); resource 1: HmH.
        assert_eq!(inst.mean_consumption(0, 0), 0.1);
        assert_eq!(inst.mean_consumption(0, 1), 0.9);
        assert_eq!(inst.mean_consumption(7, 0), 0.9);
        assert_eq!(inst.mean_consumption(7, 1), 0.1);
    }

    #[test]
    fn catalog_preconditions() {
        assert!(matches!(
            gen_synthetic(
                8,
                1,
                RewardProfile::OneGroup,
                MatchPattern::Mixture,
                VariabilityMode::Deterministic,
                10.0
            ),
            Err(HarnessError::MixtureNeedsTwoResources(1))
        ));
        assert!(matches!(
            gen_synthetic(
                7,
                1,
                RewardProfile::OneGroup,
                MatchPattern::HmH,
                VariabilityMode::Deterministic,
                10.0
            ),
            Err(HarnessError::OddArmCount(7))
        ));
    }

    #[test]
    fn wilson_interval_examples() {
        let (lo, _) = wilson_interval(0, 100, 1.96).unwrap();
        assert_eq!(lo, 0.0);
        let (lo, hi) = wilson_interval(50, 100, 1.96).unwrap();
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12, "symmetric about 0.5");
        let (lo, hi) = wilson_interval(10, 100, 1.96).unwrap();
        assert!((lo - 0.0552).abs() < 1e-3, "lo={lo}");
        assert!((hi - 0.1744).abs() < 1e-3, "hi={hi}");
        assert!(wilson_interval(5, 0, 1.96).is_err());
        assert!(wilson_interval(5, 4, 1.96).is_err());
    }

    #[test]
    fn lemma_check_impossible_threshold_gives_zero() {
        // f(0.5) > 1, so a mean of [0,1] draws can never exceed it.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (empirical, bound) = mc_check_consumption_lemma(0.5, 20, 2000, &mut rng).unwrap();
        assert_eq!(empirical, 0.0);
        assert!((bound - (-20.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!(lemma_check_passes(empirical, bound, 2000));
    }

    #[test]
    fn lemma_check_rejects_bad_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(mc_check_consumption_lemma(1.0, 5, 10, &mut rng).is_err());
        assert!(mc_check_consumption_lemma(0.5, 0, 10, &mut rng).is_err());
    }

    fn noiseless_config() -> ExperimentConfig {
        let instance = InstanceSpec::new(
            vec![60.0],
            vec![
                RewardModel::Bernoulli { mean: 1.0 },
                RewardModel::Bernoulli { mean: 0.0 },
                RewardModel::Bernoulli { mean: 0.0 },
                RewardModel::Bernoulli { mean: 0.0 },
            ],
            vec![vec![1.0]; 4],
            ConsumptionMode::Deterministic,
        )
        .unwrap();
        ExperimentConfig {
            instance: Some(instance),
            instance_path: None,
            strategies: vec![StrategySpec {
                name: StrategyName::Shrr,
                params: BaselineParams::default(),
            }],
            trials: 100,
            master_seed: 7,
            output_path: "unused.csv".into(),
        }
    }

    #[test]
    fn noiseless_experiment_never_fails() {
        let results = run_experiment(&noiseless_config()).unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].failures, 0);
        assert_eq!(results[0].breached_trials, 0);
        assert_eq!(results[0].failure_rate, 0.0);
        assert!(results[0].mean_consumption[0] <= 60.0);
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let config = noiseless_config();
        let a = results_to_csv(&run_experiment(&config).unwrap());
        let b = results_to_csv(&run_experiment(&config).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(
            "strategy,trials,failures,failure_rate,wilson_lo,wilson_hi,mean_pulls,mean_consumption_1,master_seed\n"
        ));
    }

    #[test]
    fn config_schema_errors_name_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, r#"{"strategies": [{"name": "shrr"}], "master_seed": 1, "output_path": "x.csv"}"#)
            .unwrap();
        let err = read_config(path.to_str().unwrap()).unwrap_err().to_string();
        assert!(err.contains("trials"), "got: {err}");

        std::fs::write(
            &path,
            r#"{"strategies": [], "trials": 5, "master_seed": 1, "output_path": "x.csv",
                "instance_path": "inst.json"}"#,
        )
        .unwrap();
        let err = read_config(path.to_str().unwrap()).unwrap_err().to_string();
        assert!(err.contains("strategy list"), "got: {err}");
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = noiseless_config();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn figure_rows_have_both_settings_per_point() {
        let rows = figure_compare(&[0.5, 0.2], 200, 11).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].setting, ConsumptionSetting::Det);
        assert_eq!(rows[1].setting, ConsumptionSetting::Sto);
        assert_eq!(rows[0].d, 0.5);
        let csv = figure_rows_to_csv(&rows);
        assert!(csv.starts_with("d,setting,trials,failures,log_failure_rate\n"));
        assert!(csv.contains(",det,") && csv.contains(",sto,"));
    }
}
