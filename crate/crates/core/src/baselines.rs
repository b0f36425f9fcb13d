//! Anytime comparison strategies: uniform sampling, UCB, anytime LUCB, and
//! doubling sequential halving.
//!
//! None of these stop on their own — they keep pulling until the simulation
//! loop ends the run on a budget breach, and they maintain a recommendation
//! (the current empirical leader, except DSH which prefers the winner of its
//! last completed halving run) after every pull. Hyperparameter defaults
//! follow the usual choices for each method and are overridable through
//! [`BaselineParams`].

use crate::instance::Outcome;
use crate::shrr::halve;
use crate::strategy::{argmax_first, ceil_log2, Selection, Strategy, StrategyError};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("ucb_exploration must be positive, got {0}")]
    UcbExploration(f64),
    #[error("atlucb_delta1 must lie in (0, 1), got {0}")]
    AtlucbDelta1(f64),
    #[error("atlucb_alpha must lie in (0, 1), got {0}")]
    AtlucbAlpha(f64),
    #[error("atlucb_epsilon must be nonnegative, got {0}")]
    AtlucbEpsilon(f64),
    #[error("dsh_initial_budget must be positive")]
    DshBudget,
}

/// Tunable parameters of the baseline strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineParams {
    pub ucb_exploration: f64,
    pub atlucb_delta1: f64,
    pub atlucb_alpha: f64,
    pub atlucb_epsilon: f64,
    /// Pull budget of the first DSH run; `None` means `K * ceil(log2 K)`,
    /// the smallest budget granting one pull per arm per phase.
    pub dsh_initial_budget: Option<u64>,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            ucb_exploration: 2.0,
            atlucb_delta1: 0.01,
            atlucb_alpha: 0.99,
            atlucb_epsilon: 0.0,
            dsh_initial_budget: None,
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.ucb_exploration.is_nan() || self.ucb_exploration <= 0.0 {
            return Err(ParamsError::UcbExploration(self.ucb_exploration));
        }
        if !(self.atlucb_delta1 > 0.0 && self.atlucb_delta1 < 1.0) {
            return Err(ParamsError::AtlucbDelta1(self.atlucb_delta1));
        }
        if !(self.atlucb_alpha > 0.0 && self.atlucb_alpha < 1.0) {
            return Err(ParamsError::AtlucbAlpha(self.atlucb_alpha));
        }
        if self.atlucb_epsilon.is_nan() || self.atlucb_epsilon < 0.0 {
            return Err(ParamsError::AtlucbEpsilon(self.atlucb_epsilon));
        }
        if self.dsh_initial_budget == Some(0) {
            return Err(ParamsError::DshBudget);
        }
        Ok(())
    }

    pub fn dsh_budget_for(&self, arm_count: usize) -> u64 {
        self.dsh_initial_budget
            .unwrap_or_else(|| (arm_count as u64 * u64::from(ceil_log2(arm_count))).max(1))
    }
}

/// Per-arm running sums shared by the baselines.
#[derive(Debug, Clone)]
struct ArmStats {
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl ArmStats {
    fn new(arm_count: usize) -> Self {
        ArmStats { sums: vec![0.0; arm_count], counts: vec![0; arm_count] }
    }

    fn record(&mut self, arm: usize, reward: f64) {
        self.sums[arm] += reward;
        self.counts[arm] += 1;
    }

    /// Empirical mean; 0 for a never-pulled arm.
    fn mean(&self, arm: usize) -> f64 {
        self.sums[arm] / (self.counts[arm].max(1) as f64)
    }

    fn leader(&self) -> usize {
        argmax_first((0..self.sums.len()).map(|k| self.mean(k)))
    }

    fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn check_pending(pending: &mut Option<usize>, arm: usize) -> Result<(), StrategyError> {
    match pending.take() {
        Some(expected) if expected == arm => Ok(()),
        expected => Err(StrategyError::ObservationMismatch { expected, got: arm }),
    }
}

/// Cycles through the arms in index order; recommends the empirical leader.
#[derive(Debug, Clone)]
pub struct UniformStrategy {
    arm_count: usize,
    next: usize,
    stats: ArmStats,
    pending: Option<usize>,
}

impl UniformStrategy {
    pub fn new(arm_count: usize) -> Self {
        assert!(arm_count >= 1);
        UniformStrategy { arm_count, next: 0, stats: ArmStats::new(arm_count), pending: None }
    }
}

impl Strategy for UniformStrategy {
    fn select(&mut self) -> Result<Selection, StrategyError> {
        self.pending = Some(self.next);
        Ok(Selection::Pull(self.next))
    }

    fn observe(&mut self, arm: usize, outcome: &Outcome) -> Result<(), StrategyError> {
        check_pending(&mut self.pending, arm)?;
        self.stats.record(arm, outcome.reward);
        self.next = (self.next + 1) % self.arm_count;
        Ok(())
    }

    fn recommendation(&self) -> usize {
        self.stats.leader()
    }
}

/// UCB1-style index policy with a configurable exploration constant.
#[derive(Debug, Clone)]
pub struct UcbStrategy {
    exploration: f64,
    stats: ArmStats,
    pending: Option<usize>,
}

impl UcbStrategy {
    pub fn new(arm_count: usize, exploration: f64) -> Self {
        assert!(arm_count >= 1);
        UcbStrategy { exploration, stats: ArmStats::new(arm_count), pending: None }
    }

    fn index(&self, arm: usize, total: u64) -> f64 {
        if self.stats.counts[arm] == 0 {
            return f64::INFINITY;
        }
        let bonus =
            (self.exploration * (total as f64).ln() / (self.stats.counts[arm] as f64)).sqrt();
        self.stats.mean(arm) + bonus
    }
}

impl Strategy for UcbStrategy {
    fn select(&mut self) -> Result<Selection, StrategyError> {
        // One initial pull per arm in index order, then the index rule.
        let arm = if let Some(unpulled) = self.stats.counts.iter().position(|&n| n == 0) {
            unpulled
        } else {
            let total = self.stats.total();
            argmax_first((0..self.stats.counts.len()).map(|k| self.index(k, total)))
        };
        self.pending = Some(arm);
        Ok(Selection::Pull(arm))
    }

    fn observe(&mut self, arm: usize, outcome: &Outcome) -> Result<(), StrategyError> {
        check_pending(&mut self.pending, arm)?;
        self.stats.record(arm, outcome.reward);
        Ok(())
    }

    fn recommendation(&self) -> usize {
        self.stats.leader()
    }
}

/// Anytime LUCB: repeatedly pulls the empirical leader and its strongest
/// challenger under stage-wise shrinking confidence levels.
#[derive(Debug, Clone)]
pub struct AtLucbStrategy {
    delta1: f64,
    alpha: f64,
    epsilon: f64,
    stage: u32,
    stats: ArmStats,
    queue: VecDeque<usize>,
    pending: Option<usize>,
}

impl AtLucbStrategy {
    pub fn new(arm_count: usize, delta1: f64, alpha: f64, epsilon: f64) -> Self {
        assert!(arm_count >= 1);
        AtLucbStrategy {
            delta1,
            alpha,
            epsilon,
            stage: 1,
            stats: ArmStats::new(arm_count),
            queue: VecDeque::new(),
            pending: None,
        }
    }

    /// Confidence level of stage `s`: `delta1 * alpha^(s-1)`.
    pub fn stage_delta(&self, stage: u32) -> f64 {
        self.delta1 * self.alpha.powi(stage as i32 - 1)
    }

    /// Confidence deviation `sqrt(ln(5 K t^4 / (4 delta)) / (2 n))`;
    /// infinite for a never-pulled arm.
    fn deviation(&self, arm: usize, total: u64, delta: f64) -> f64 {
        let n = self.stats.counts[arm];
        if n == 0 {
            return f64::INFINITY;
        }
        let k = self.stats.counts.len() as f64;
        let t = (total.max(1)) as f64;
        ((5.0 * k * t.powi(4) / (4.0 * delta)).ln() / (2.0 * n as f64)).sqrt()
    }

    fn pick_pair(&self) -> (usize, usize) {
        let arms = self.stats.counts.len();
        let leader = self.stats.leader();
        let total = self.stats.total();
        let delta = self.stage_delta(self.stage);
        let challenger_of = |k: usize| {
            if k == leader {
                f64::NEG_INFINITY
            } else {
                self.stats.mean(k) + self.deviation(k, total, delta)
            }
        };
        let challenger = argmax_first((0..arms).map(challenger_of));
        (leader, challenger)
    }

    /// Advances the stage while the termination condition of the current
    /// stage holds: the leader's lower bound exceeds every challenger's
    /// upper bound minus epsilon.
    fn advance_stage(&mut self) {
        let arms = self.stats.counts.len();
        if arms == 1 {
            return;
        }
        loop {
            let leader = self.stats.leader();
            let total = self.stats.total();
            let delta = self.stage_delta(self.stage);
            let lower = self.stats.mean(leader) - self.deviation(leader, total, delta);
            let mut best_upper = f64::NEG_INFINITY;
            for k in (0..arms).filter(|&k| k != leader) {
                best_upper =
                    best_upper.max(self.stats.mean(k) + self.deviation(k, total, delta));
            }
            if lower > best_upper - self.epsilon {
                self.stage += 1;
            } else {
                return;
            }
        }
    }
}

impl Strategy for AtLucbStrategy {
    fn select(&mut self) -> Result<Selection, StrategyError> {
        if let Some(arm) = self.pending {
            return Ok(Selection::Pull(arm));
        }
        if self.queue.is_empty() {
            let (leader, challenger) = self.pick_pair();
            self.queue.push_back(leader);
            if challenger != leader {
                self.queue.push_back(challenger);
            }
        }
        let arm = *self.queue.front().expect("queue refilled above");
        self.pending = Some(arm);
        Ok(Selection::Pull(arm))
    }

    fn observe(&mut self, arm: usize, outcome: &Outcome) -> Result<(), StrategyError> {
        check_pending(&mut self.pending, arm)?;
        self.queue.pop_front();
        self.stats.record(arm, outcome.reward);
        if self.queue.is_empty() {
            self.advance_stage();
        }
        Ok(())
    }

    fn recommendation(&self) -> usize {
        self.stats.leader()
    }
}

/// Sequential halving under a fixed pull budget, restarted with doubled
/// budgets (the doubling trick). Elimination uses the means of the samples
/// taken within the current phase; the recommendation is the winner of the
/// last completed run, or the current run's empirical leader before any run
/// has completed.
#[derive(Debug, Clone)]
pub struct DshStrategy {
    arm_count: usize,
    phase_count: u32,
    budget: u64,
    survivors: Vec<usize>,
    phase: u32,
    /// Pulls per surviving arm in the current phase.
    quota: u64,
    /// Pulls already made in the current phase.
    phase_progress: u64,
    /// Per-arm statistics of the current phase only (fresh each phase).
    phase_stats: ArmStats,
    /// Per-arm statistics of the current run (for pre-completion
    /// recommendations).
    run_stats: ArmStats,
    last_winner: Option<usize>,
    pending: Option<usize>,
}

impl DshStrategy {
    pub fn new(arm_count: usize, initial_budget: u64) -> Self {
        assert!(arm_count >= 1);
        assert!(initial_budget >= 1);
        let phase_count = ceil_log2(arm_count);
        let mut strategy = DshStrategy {
            arm_count,
            phase_count,
            budget: initial_budget,
            survivors: (0..arm_count).collect(),
            phase: 0,
            quota: 0,
            phase_progress: 0,
            phase_stats: ArmStats::new(arm_count),
            run_stats: ArmStats::new(arm_count),
            last_winner: None,
            pending: None,
        };
        strategy.quota = strategy.phase_quota();
        strategy.settle();
        strategy
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn last_winner(&self) -> Option<usize> {
        self.last_winner
    }

    /// `floor(B / (|survivors| * ceil(log2 K)))` pulls per arm.
    fn phase_quota(&self) -> u64 {
        if self.phase_count == 0 {
            return 0;
        }
        self.budget / (self.survivors.len() as u64 * u64::from(self.phase_count))
    }

    fn phase_done(&self) -> bool {
        self.phase_progress >= self.quota * self.survivors.len() as u64
    }

    /// Advances through any completed (or zero-quota) phases. Run completion
    /// is recorded here, eagerly, so that a breach arriving right after a
    /// run's last pull already sees that run's winner.
    fn settle(&mut self) {
        if self.arm_count == 1 {
            return;
        }
        while self.phase_done() {
            self.advance();
        }
    }

    /// Eliminates on the current phase's means and moves on; after the final
    /// phase, records the winner and restarts with a doubled budget.
    fn advance(&mut self) {
        let means: Vec<f64> =
            self.survivors.iter().map(|&k| self.phase_stats.mean(k)).collect();
        self.survivors = halve(&self.survivors, &means);
        self.phase += 1;
        self.phase_stats = ArmStats::new(self.arm_count);
        self.phase_progress = 0;
        if self.phase >= self.phase_count {
            self.last_winner = Some(self.survivors[0]);
            self.budget = self.budget.saturating_mul(2);
            self.survivors = (0..self.arm_count).collect();
            self.phase = 0;
            self.run_stats = ArmStats::new(self.arm_count);
        }
        self.quota = self.phase_quota();
    }
}

impl Strategy for DshStrategy {
    fn select(&mut self) -> Result<Selection, StrategyError> {
        if let Some(arm) = self.pending {
            return Ok(Selection::Pull(arm));
        }
        if self.arm_count == 1 {
            self.pending = Some(0);
            return Ok(Selection::Pull(0));
        }
        let position = (self.phase_progress % self.survivors.len() as u64) as usize;
        let arm = self.survivors[position];
        self.pending = Some(arm);
        Ok(Selection::Pull(arm))
    }

    fn observe(&mut self, arm: usize, outcome: &Outcome) -> Result<(), StrategyError> {
        check_pending(&mut self.pending, arm)?;
        self.phase_stats.record(arm, outcome.reward);
        self.run_stats.record(arm, outcome.reward);
        self.phase_progress += 1;
        self.settle();
        Ok(())
    }

    fn recommendation(&self) -> usize {
        self.last_winner.unwrap_or_else(|| self.run_stats.leader())
    }
}
