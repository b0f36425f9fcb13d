//! Sequential Halving with Resource Rationing.
//!
//! The strategy runs `ceil(log2 K)` elimination phases. Each phase receives an
//! equal ration of every resource (capacity divided by the phase count) plus
//! whatever the previous phase left unused, pulls the surviving arms round
//! robin while the next pull is guaranteed to fit within the ration, then
//! keeps the top half of the survivors by cumulative empirical mean. A phase
//! therefore never exceeds its ration, and the leftover carry telescopes the
//! total consumption to at most the capacity of every resource — the strategy
//! is feasible with certainty and needs no breach handling.
//!
//! "Guaranteed to fit" depends on what is known about consumption. In
//! general a pull may consume up to one unit per resource, so the phase pulls
//! while `I_l <= ration_l - 1`. When the consumption setting is publicly
//! known to be deterministic, each arm's per-pull consumption is known
//! exactly after its first observation, and the reserve shrinks from the
//! worst-case 1 to the next arm's actual consumption — without this, small
//! capacities would strand up to one unit per resource per phase and bury
//! the very sample-efficiency the deterministic setting buys.
//!
//! Empirical means aggregate all observations since phase 0; an arm that was
//! never pulled counts as mean 0 (the `max{., 1}` denominator guard).

use crate::instance::Outcome;
use crate::numeric::CompensatedSum;
use crate::strategy::{ceil_log2, Selection, Strategy, StrategyError};
use serde::Serialize;

/// Rationed sequential-halving strategy state. Serializable for
/// debugging dumps.
#[derive(Debug, Clone, Serialize)]
pub struct ShrrStrategy {
    arm_count: usize,
    /// `ceil(log2 K)`; zero for a single arm.
    phase_count: u32,
    /// Per-phase base allowance `C_l / phase_count`.
    base_rations: Vec<f64>,
    /// Current phase index `q`.
    phase: u32,
    /// Ration of the current phase per resource (base plus carried leftover).
    rations: Vec<f64>,
    /// Consumption of the current phase per resource (`I_l`), accumulated
    /// with compensation so ration-boundary comparisons stay exact.
    phase_consumed: Vec<CompensatedSum>,
    /// Pulls per arm within the current phase.
    phase_counts: Vec<u64>,
    /// Surviving arms, ascending by index.
    surviving: Vec<usize>,
    /// Global step counter driving the round-robin residue; starts at 1 and
    /// is not reset between phases.
    step: u64,
    /// Per-arm cumulative reward over all phases.
    cum_reward: Vec<f64>,
    /// Per-arm cumulative pull count over all phases.
    cum_pulls: Vec<u64>,
    /// Final recommendation once the last phase closed.
    finished: Option<usize>,
    /// Set once `select` reported `Finished`; further calls are errors.
    reported_finished: bool,
    /// Arm of the pending (selected, not yet observed) pull.
    pending: Option<usize>,
    /// Whether the consumption setting is known to be deterministic.
    deterministic_consumption: bool,
    /// Exact per-arm consumption vectors, learned on first observation when
    /// the setting is deterministic.
    known_consumption: Vec<Option<Vec<f64>>>,
}

impl ShrrStrategy {
    /// Sets up phase 0 with rations `C_l / ceil(log2 K)`, reserving one full
    /// unit per resource for every upcoming pull (consumption is only known
    /// to be bounded by 1).
    ///
    /// A single arm means zero phases: the strategy is finished immediately.
    /// A ration below 1 fails the while-condition before any pull, so such
    /// phases close right away, eliminating by index order.
    pub fn new(arm_count: usize, capacities: &[f64]) -> Self {
        Self::build(arm_count, capacities, false)
    }

    /// Like [`ShrrStrategy::new`], for the deterministic consumption setting:
    /// each arm's exact consumption is learned at its first observation, and
    /// later pulls reserve only that amount instead of a full unit.
    pub fn with_deterministic_consumption(arm_count: usize, capacities: &[f64]) -> Self {
        Self::build(arm_count, capacities, true)
    }

    fn build(arm_count: usize, capacities: &[f64], deterministic_consumption: bool) -> Self {
        assert!(arm_count >= 1, "the strategy needs at least one arm");
        let phase_count = ceil_log2(arm_count);
        let base_rations: Vec<f64> = if phase_count == 0 {
            capacities.to_vec()
        } else {
            capacities.iter().map(|&c| c / f64::from(phase_count)).collect()
        };
        let mut state = ShrrStrategy {
            arm_count,
            phase_count,
            rations: base_rations.clone(),
            base_rations,
            phase: 0,
            phase_consumed: vec![CompensatedSum::default(); capacities.len()],
            phase_counts: vec![0; arm_count],
            surviving: (0..arm_count).collect(),
            step: 1,
            cum_reward: vec![0.0; arm_count],
            cum_pulls: vec![0; arm_count],
            finished: if arm_count == 1 { Some(0) } else { None },
            reported_finished: false,
            pending: None,
            deterministic_consumption,
            known_consumption: vec![None; arm_count],
        };
        state.close_exhausted_phases();
        state
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    pub fn rations(&self) -> &[f64] {
        &self.rations
    }

    pub fn phase_consumed(&self) -> Vec<f64> {
        (0..self.rations.len()).map(|l| self.phase_consumed_value(l)).collect()
    }

    pub fn pulls_of(&self, arm: usize) -> u64 {
        self.cum_pulls[arm]
    }

    /// Cumulative empirical mean of an arm; 0 when never pulled.
    pub fn empirical_mean(&self, arm: usize) -> f64 {
        self.cum_reward[arm] / (self.cum_pulls[arm].max(1) as f64)
    }

    /// JSON dump of the full state for debugging.
    pub fn debug_dump(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serialization cannot fail")
    }

    /// The arm the round-robin residue schedules next.
    fn next_arm(&self) -> usize {
        let n = self.surviving.len() as u64;
        let residue = (self.step % n) as usize;
        let position = if residue == 0 { self.surviving.len() - 1 } else { residue - 1 };
        self.surviving[position]
    }

    /// Phase consumption of one resource. In the deterministic setting this
    /// is evaluated as per-arm `count * d` products (one rounding per arm),
    /// which keeps exact instance families exactly on their boundaries; in
    /// the stochastic settings it is the compensated outcome sum.
    fn phase_consumed_value(&self, resource: usize) -> f64 {
        if self.deterministic_consumption {
            self.phase_counts
                .iter()
                .enumerate()
                .filter(|(_, &count)| count > 0)
                .map(|(arm, &count)| {
                    let d = self.known_consumption[arm]
                        .as_ref()
                        .expect("pulled arms have known consumption in the deterministic setting");
                    count as f64 * d[resource]
                })
                .sum()
        } else {
            self.phase_consumed[resource].value()
        }
    }

    /// While-condition of the phase loop: the next scheduled pull is certain
    /// to fit within every ration.
    ///
    /// In the stochastic settings a pull may consume a full unit per
    /// resource, so the phase pulls while `I_l <= ration_l - 1`. In the
    /// deterministic setting the next arm's consumption is known after its
    /// first observation, and the check projects the phase consumption with
    /// the candidate pull included (worst-case 1 before that observation).
    fn may_pull(&self) -> bool {
        if !self.deterministic_consumption {
            return self
                .phase_consumed
                .iter()
                .zip(&self.rations)
                .all(|(consumed, &ration)| consumed.value() <= ration - 1.0);
        }
        let next = self.next_arm();
        match &self.known_consumption[next] {
            None => (0..self.rations.len())
                .all(|l| self.phase_consumed_value(l) + 1.0 <= self.rations[l]),
            Some(_) => (0..self.rations.len()).all(|l| {
                let projected: f64 = self
                    .phase_counts
                    .iter()
                    .enumerate()
                    .map(|(arm, &count)| {
                        let count = count + u64::from(arm == next);
                        if count == 0 {
                            return 0.0;
                        }
                        let d = self.known_consumption[arm]
                            .as_ref()
                            .expect("pulled arms have known consumption");
                        count as f64 * d[l]
                    })
                    .sum();
                projected <= self.rations[l]
            }),
        }
    }

    /// Closes phases while the while-condition fails: eliminate the bottom
    /// half, carry the unused ration into the next phase, and finish after
    /// the last phase. Cascades across consecutive underfunded phases.
    fn close_exhausted_phases(&mut self) {
        while self.finished.is_none() && !self.may_pull() {
            let means: Vec<f64> =
                self.surviving.iter().map(|&k| self.empirical_mean(k)).collect();
            self.surviving = halve(&self.surviving, &means);
            self.phase += 1;
            if self.phase >= self.phase_count {
                debug_assert_eq!(self.surviving.len(), 1);
                self.finished = Some(self.surviving[0]);
                return;
            }
            for l in 0..self.rations.len() {
                self.rations[l] =
                    self.base_rations[l] + (self.rations[l] - self.phase_consumed_value(l));
                self.phase_consumed[l] = CompensatedSum::default();
            }
            self.phase_counts = vec![0; self.arm_count];
        }
    }
}

impl Strategy for ShrrStrategy {
    fn select(&mut self) -> Result<Selection, StrategyError> {
        if let Some(arm) = self.finished {
            if self.reported_finished {
                return Err(StrategyError::SelectAfterFinished);
            }
            self.reported_finished = true;
            return Ok(Selection::Finished(arm));
        }
        // close_exhausted_phases keeps the while-condition true here.
        let arm = self.next_arm();
        self.pending = Some(arm);
        Ok(Selection::Pull(arm))
    }

    fn observe(&mut self, arm: usize, outcome: &Outcome) -> Result<(), StrategyError> {
        match self.pending {
            Some(expected) if expected == arm => self.pending = None,
            expected => return Err(StrategyError::ObservationMismatch { expected, got: arm }),
        }
        if outcome.consumptions.len() != self.rations.len() {
            return Err(StrategyError::ResourceMismatch {
                expected: self.rations.len(),
                got: outcome.consumptions.len(),
            });
        }
        for (consumed, &d) in self.phase_consumed.iter_mut().zip(&outcome.consumptions) {
            consumed.add(d);
        }
        self.phase_counts[arm] += 1;
        if self.deterministic_consumption && self.known_consumption[arm].is_none() {
            self.known_consumption[arm] = Some(outcome.consumptions.clone());
        }
        self.cum_reward[arm] += outcome.reward;
        self.cum_pulls[arm] += 1;
        self.step += 1;
        self.close_exhausted_phases();
        Ok(())
    }

    fn recommendation(&self) -> usize {
        if let Some(arm) = self.finished {
            return arm;
        }
        // Mid-run the leader among survivors by cumulative empirical mean.
        let mut best = self.surviving[0];
        for &k in &self.surviving[1..] {
            if self.empirical_mean(k) > self.empirical_mean(best) {
                best = k;
            }
        }
        best
    }
}

/// Keeps the `ceil(n/2)` arms with the largest means.
///
/// Ties break toward the smaller arm index; the result preserves ascending
/// index order.
pub fn halve(survivors: &[usize], means: &[f64]) -> Vec<usize> {
    debug_assert_eq!(survivors.len(), means.len());
    let keep = survivors.len().div_ceil(2);
    let mut order: Vec<usize> = (0..survivors.len()).collect();
    order.sort_by(|&a, &b| {
        means[b]
            .partial_cmp(&means[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(survivors[a].cmp(&survivors[b]))
    });
    let mut kept: Vec<usize> = order[..keep].iter().map(|&i| survivors[i]).collect();
    kept.sort_unstable();
    kept
}
