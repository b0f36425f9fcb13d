//! Invariant checks across randomized instances, seeds, and modes.

mod common;

use bairc_core::baselines::{
    AtLucbStrategy, BaselineParams, DshStrategy, UcbStrategy, UniformStrategy,
};
use bairc_core::complexity::{
    build_det_lb_instance, f_effective, gaps, h1_det, h2_det, h2_sto, tilde_h_det,
};
use bairc_core::harness::{
    gen_synthetic, run_strategy_trials, wilson_interval, MatchPattern, RewardProfile,
    StrategyName, VariabilityMode,
};
use bairc_core::instance::{ConsumptionMode, InstanceSpec, RewardModel};
use bairc_core::shrr::ShrrStrategy;
use bairc_core::sim::{child_seed, simulate};
use bairc_core::strategy::{ceil_log2, Selection, Strategy};
use common::{distinct_rewards, dyadic_lb_rewards, random_instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn outcomes_satisfy_type_invariants_in_every_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    for mode in [
        ConsumptionMode::Deterministic,
        ConsumptionMode::IndependentBernoulli,
        ConsumptionMode::CoupledUniform,
    ] {
        let inst = InstanceSpec::new(
            vec![5.0, 5.0],
            vec![
                RewardModel::Bernoulli { mean: 0.3 },
                RewardModel::Bernoulli { mean: 0.8 },
            ],
            vec![vec![0.25, 1.0], vec![0.7, 0.01]],
            mode,
        )
        .unwrap();
        for _ in 0..100_000 {
            let arm = rng.random_range(0..2);
            let o = inst.sample_outcome(arm, &mut rng).unwrap();
            assert!(o.consumptions.iter().all(|&c| (0.0..=1.0).contains(&c)));
            assert!(o.reward == 0.0 || o.reward == 1.0, "Bernoulli rewards are 0/1");
        }
    }
}

#[test]
fn coupled_mode_comonotonicity_across_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    for _ in 0..50 {
        let r: f64 = rng.random_range(0.05..0.95);
        let d: f64 = rng.random_range(r..1.0); // r <= d
        let inst = InstanceSpec::new(
            vec![1.0],
            vec![RewardModel::Bernoulli { mean: r }],
            vec![vec![d]],
            ConsumptionMode::CoupledUniform,
        )
        .unwrap();
        for _ in 0..2000 {
            let o = inst.sample_outcome(0, &mut rng).unwrap();
            if o.reward == 1.0 {
                assert_eq!(o.consumptions[0], 1.0, "r={r} d={d}");
            }
        }
    }
}

#[test]
fn simulate_is_deterministic_given_the_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..30u64 {
        let inst = random_instance(&mut rng, 2..=10, 1..=3, 30.0);
        let seed = child_seed(7, round);
        let run = |name: StrategyName| {
            run_strategy_trials(&inst, name, &BaselineParams::default(), 3, seed)
                .expect("trials run")
        };
        for name in [StrategyName::Shrr, StrategyName::Uniform, StrategyName::Ucb] {
            assert_eq!(run(name), run(name));
        }
    }
}

#[test]
fn simulated_records_never_exceed_capacities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEED);
    for round in 0..60u64 {
        let inst = random_instance(&mut rng, 2..=8, 1..=3, 15.0);
        for name in [
            StrategyName::Shrr,
            StrategyName::Uniform,
            StrategyName::Ucb,
            StrategyName::Atlucb,
            StrategyName::Dsh,
        ] {
            let records =
                run_strategy_trials(&inst, name, &BaselineParams::default(), 5, round).unwrap();
            for record in &records {
                for (l, &total) in record.total_consumption.iter().enumerate() {
                    assert!(
                        total <= inst.capacities()[l],
                        "{name:?} exceeded capacity {l}: {total} > {}",
                        inst.capacities()[l]
                    );
                }
                assert!(record.recommended_arm < inst.arm_count());
                if name == StrategyName::Shrr {
                    assert!(!record.breached, "rationed halving never breaches");
                }
            }
        }
    }
}

#[test]
fn shrr_structure_rations_and_round_robin() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACE);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 2..=16, 1..=3, 40.0);
        let k = inst.arm_count();
        let phases = ceil_log2(k);
        let floor: Vec<f64> =
            inst.capacities().iter().map(|&c| c / f64::from(phases)).collect();
        let mut strategy = ShrrStrategy::new(k, inst.capacities());
        let mut phase = strategy.phase();
        let mut phase_pulls = vec![0u64; k];
        let mut survivors_at_phase = strategy.surviving().to_vec();
        let check_balance = |pulls: &[u64], survivors: &[usize]| {
            let counts: Vec<u64> = survivors.iter().map(|&a| pulls[a]).collect();
            let lo = *counts.iter().min().unwrap();
            let hi = *counts.iter().max().unwrap();
            assert!(hi - lo <= 1, "round robin balance violated: {counts:?}");
        };
        loop {
            if !strategy.is_finished() {
                // Survivor count is pinned to the phase index, and every
                // ration stays at or above the per-phase floor.
                assert_eq!(
                    strategy.surviving().len(),
                    k.div_ceil(1 << strategy.phase().min(63)),
                    "K={k} phase {}",
                    strategy.phase()
                );
                for (l, &f) in floor.iter().enumerate() {
                    assert!(
                        strategy.rations()[l] >= f - 1e-9,
                        "ration below floor: {} < {f}",
                        strategy.rations()[l]
                    );
                }
            }
            match strategy.select().unwrap() {
                Selection::Finished(arm) => {
                    assert!(arm < k);
                    break;
                }
                Selection::Pull(arm) => {
                    let outcome = inst.sample_outcome(arm, &mut rng).unwrap();
                    strategy.observe(arm, &outcome).unwrap();
                    phase_pulls[arm] += 1;
                    if strategy.phase() != phase {
                        check_balance(&phase_pulls, &survivors_at_phase);
                        phase = strategy.phase();
                        if !strategy.is_finished() {
                            survivors_at_phase = strategy.surviving().to_vec();
                            phase_pulls = vec![0; k];
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn shrr_noiseless_identification_every_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1D);
    for round in 0..200u64 {
        let k = rng.random_range(2..=24usize);
        let best = rng.random_range(0..k);
        let rewards: Vec<RewardModel> = (0..k)
            .map(|i| RewardModel::Bernoulli { mean: if i == best { 1.0 } else { 0.0 } })
            .collect();
        let consumptions: Vec<Vec<f64>> =
            (0..k).map(|_| vec![rng.random_range(0.1..=1.0)]).collect();
        // Budget generous enough for at least one pull per survivor per phase.
        let capacity = f64::from(ceil_log2(k)) * (k as f64 + 1.0);
        let inst = InstanceSpec::new(
            vec![capacity],
            rewards,
            consumptions,
            ConsumptionMode::Deterministic,
        )
        .unwrap();
        let mut strategy = ShrrStrategy::new(k, inst.capacities());
        let mut trial_rng = ChaCha8Rng::seed_from_u64(child_seed(0x1D, round));
        let record = simulate(&inst, &mut strategy, &mut trial_rng).unwrap();
        assert!(record.correct, "K={k} best={best}");
        assert!(!record.breached);
    }
}

#[test]
fn baselines_run_until_breach_and_recommend_valid_arms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 2..=6, 1..=2, 10.0);
        let k = inst.arm_count();
        let strategies: Vec<(&str, Box<dyn Strategy>)> = vec![
            ("uniform", Box::new(UniformStrategy::new(k))),
            ("ucb", Box::new(UcbStrategy::new(k, 2.0))),
            ("atlucb", Box::new(AtLucbStrategy::new(k, 0.01, 0.99, 0.0))),
            ("dsh", Box::new(DshStrategy::new(k, BaselineParams::default().dsh_budget_for(k)))),
        ];
        for (name, mut strategy) in strategies {
            let record = simulate(&inst, strategy.as_mut(), &mut rng).unwrap();
            assert!(record.breached, "{name} must be stopped by the budget");
            assert!(record.recommended_arm < k);
        }
    }
}

#[test]
fn noiseless_baselines_identify_the_best_arm() {
    // Uniform, UCB, and DSH with noise-free rewards and a roomy budget.
    let k = 8;
    let best = 2;
    let rewards: Vec<RewardModel> = (0..k)
        .map(|i| RewardModel::Bernoulli { mean: if i == best { 1.0 } else { 0.0 } })
        .collect();
    let inst = InstanceSpec::new(
        vec![200.0],
        rewards,
        vec![vec![1.0]; 8],
        ConsumptionMode::Deterministic,
    )
    .unwrap();
    let strategies: Vec<(&str, Box<dyn Strategy>)> = vec![
        ("uniform", Box::new(UniformStrategy::new(k))),
        ("ucb", Box::new(UcbStrategy::new(k, 2.0))),
        ("dsh", Box::new(DshStrategy::new(k, BaselineParams::default().dsh_budget_for(k)))),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, mut strategy) in strategies {
        let record = simulate(&inst, strategy.as_mut(), &mut rng).unwrap();
        assert_eq!(record.recommended_arm, best, "{name}");
    }
}

#[test]
fn aggregate_failures_match_a_trial_recount() {
    use bairc_core::harness::{run_experiment, ExperimentConfig, StrategySpec};
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let inst = random_instance(&mut rng, 2..=8, 1..=2, 12.0);
    let config = ExperimentConfig {
        instance: Some(inst.clone()),
        instance_path: None,
        strategies: vec![
            StrategySpec { name: StrategyName::Shrr, params: BaselineParams::default() },
            StrategySpec { name: StrategyName::Dsh, params: BaselineParams::default() },
        ],
        trials: 300,
        master_seed: 555,
        output_path: "unused.csv".into(),
    };
    let results = run_experiment(&config).unwrap();
    for (spec, result) in config.strategies.iter().zip(&results) {
        let records =
            run_strategy_trials(&inst, spec.name, &spec.params, 300, 555).unwrap();
        let recount = records.iter().filter(|r| !r.correct).count() as u64;
        assert_eq!(result.failures, recount, "{}", result.strategy);
        let mean_pulls =
            records.iter().map(|r| r.pulls as f64).sum::<f64>() / records.len() as f64;
        assert!((result.mean_pulls - mean_pulls).abs() < 1e-12);
    }
}

#[test]
fn hardness_measure_orderings_hold_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAB);
    for _ in 0..10_000 {
        let k = rng.random_range(2..=12usize);
        let rewards = distinct_rewards(&mut rng, k);
        let consumptions: Vec<f64> = (0..k).map(|_| rng.random_range(0.001..=1.0)).collect();
        let h1 = h1_det(&rewards, &consumptions).unwrap();
        let h2 = h2_det(&rewards, &consumptions).unwrap();
        let hs = h2_sto(&rewards, &consumptions).unwrap();
        let (t1, t2) = tilde_h_det(&rewards, &consumptions).unwrap();
        assert!(h2 <= h1 + 1e-12 * h1.abs());
        assert!(t1 <= h1 + 1e-12 * h1.abs());
        assert!(t2 <= h2 + 1e-12 * h2.abs());
        assert!(hs > h2);
        assert!(h1 > 0.0 && h2 > 0.0 && hs > 0.0 && t1 > 0.0 && t2 > 0.0);
    }
}

#[test]
fn effective_consumption_shape() {
    let knee = (-2.0f64).exp();
    let left = f_effective(knee * (1.0 - 1e-13)).unwrap();
    let right = f_effective(knee).unwrap();
    assert!((left - right).abs() < 1e-12);
    let mut previous = 0.0;
    let e2 = (2.0f64).exp();
    for i in 1..=10_000 {
        let d = i as f64 / 10_000.0;
        let f = f_effective(d).unwrap();
        assert!(f > previous, "strictly increasing at d={d}");
        assert!(f > d, "f dominates the identity at d={d}");
        assert!(f > 0.0 && f <= e2);
        previous = f;
    }
}

#[test]
fn lower_bound_family_is_hardest_at_flip_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5B);
    for _ in 0..100 {
        let k = rng.random_range(2..=8usize);
        let l = rng.random_range(1..=2usize);
        let base_rewards = dyadic_lb_rewards(&mut rng, k);
        let sorted_consumptions: Vec<Vec<f64>> = (0..l)
            .map(|_| {
                let mut row: Vec<f64> =
                    (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
                row.sort_by(|a, b| b.partial_cmp(a).unwrap());
                row
            })
            .collect();
        let capacities = vec![10.0; l];
        let h_of = |flip: usize| -> Vec<f64> {
            let inst =
                build_det_lb_instance(&base_rewards, &sorted_consumptions, flip, &capacities)
                    .unwrap();
            let rewards: Vec<f64> = inst.reward_models().iter().map(|m| m.mean()).collect();
            (0..l).map(|res| h2_det(&rewards, &inst.consumption_column(res)).unwrap()).collect()
        };
        let hardest = h_of(0);
        for flip in 1..k {
            let h = h_of(flip);
            for res in 0..l {
                assert!(
                    hardest[res] >= h[res],
                    "flip {flip} resource {res}: {} < {}",
                    hardest[res],
                    h[res]
                );
            }
        }
    }
}

#[test]
fn synthetic_catalog_instances_are_valid() {
    for profile in [
        RewardProfile::OneGroup,
        RewardProfile::Trap,
        RewardProfile::Polynomial,
        RewardProfile::Geometric,
    ] {
        for (pattern, l) in
            [(MatchPattern::HmH, 1), (MatchPattern::HmL, 1), (MatchPattern::Mixture, 2)]
        {
            for mode in [
                VariabilityMode::Deterministic,
                VariabilityMode::Correlated,
                VariabilityMode::Uncorrelated,
            ] {
                let inst = gen_synthetic(32, l, profile, pattern, mode, 200.0).unwrap();
                assert_eq!(inst.arm_count(), 32);
                assert_eq!(inst.resource_count(), l);
                assert_eq!(inst.best_arm(), 0);
            }
        }
    }
}

proptest! {
    #[test]
    fn wilson_interval_brackets_the_rate(failures in 0u64..=500, extra in 0u64..=500, z in 0.5f64..4.0) {
        let trials = failures + extra.max(1);
        let (lo, hi) = wilson_interval(failures, trials, z).unwrap();
        let rate = failures as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(lo <= rate + 1e-12);
        prop_assert!(rate <= hi + 1e-12);
    }

    #[test]
    fn child_seeds_are_distinct_within_a_master(master in any::<u64>()) {
        let mut seen: Vec<u64> = (0..256u64).map(|i| child_seed(master, i)).collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), 256);
    }

    #[test]
    fn gaps_are_nondecreasing_beyond_the_duplicate(seed in any::<u64>(), k in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rewards = distinct_rewards(&mut rng, k);
        let g = gaps(&rewards).unwrap();
        prop_assert_eq!(g[0], g[1]);
        for i in 2..g.len() {
            prop_assert!(g[i] >= g[i - 1]);
        }
    }
}
