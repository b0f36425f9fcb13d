//! Browser bindings for the simulation core.
//!
//! Everything crosses the boundary as JSON strings so the page needs no
//! generated type glue: build or paste an instance, inspect its hardness
//! report, race the strategies on it, and draw the deterministic-vs-Bernoulli
//! consumption gap. Trials run single-threaded inside the wasm module; seeds
//! make every run reproducible.
//!
//! Build with `wasm-pack build crates/wasm-demo --target web` and serve
//! `crates/wasm-demo/www/` next to the generated `pkg/` directory.
//!
//! The `api` module holds the plain-string implementations (testable on any
//! target); the exported functions only wrap errors into `JsError`.

use wasm_bindgen::prelude::*;

mod api {
    use bairc_core::baselines::BaselineParams;
    use bairc_core::complexity::ComplexityReport;
    use bairc_core::harness::{
        figure_compare, gen_synthetic, run_strategy_trials, wilson_interval, MatchPattern,
        RewardProfile, StrategyName, VariabilityMode,
    };
    use bairc_core::instance::InstanceSpec;

    fn parse_variant<T: serde::de::DeserializeOwned>(name: &str, what: &str) -> Result<T, String> {
        serde_json::from_value(serde_json::Value::String(name.to_string()))
            .map_err(|_| format!("unknown {what}: {name}"))
    }

    pub fn catalog_instance(
        arm_count: usize,
        resource_count: usize,
        rewards: &str,
        pattern: &str,
        mode: &str,
        budget: f64,
    ) -> Result<String, String> {
        let profile: RewardProfile = parse_variant(rewards, "reward profile")?;
        let pattern: MatchPattern = parse_variant(pattern, "consumption pattern")?;
        let mode: VariabilityMode = parse_variant(mode, "variability mode")?;
        let instance = gen_synthetic(arm_count, resource_count, profile, pattern, mode, budget)
            .map_err(|e| e.to_string())?;
        Ok(instance.to_json_pretty())
    }

    pub fn complexity_report(instance_json: &str) -> Result<String, String> {
        let instance = InstanceSpec::from_json(instance_json).map_err(|e| e.to_string())?;
        let report = ComplexityReport::for_instance(&instance).map_err(|e| e.to_string())?;
        Ok(serde_json::to_string(&report).expect("report serializes"))
    }

    pub fn run_monte_carlo(
        instance_json: &str,
        strategy: &str,
        trials: u32,
        seed: u32,
    ) -> Result<String, String> {
        if trials == 0 {
            return Err("trials must be at least 1".into());
        }
        let instance = InstanceSpec::from_json(instance_json).map_err(|e| e.to_string())?;
        let name: StrategyName = parse_variant(strategy, "strategy")?;
        let records = run_strategy_trials(
            &instance,
            name,
            &BaselineParams::default(),
            u64::from(trials),
            u64::from(seed),
        )
        .map_err(|e| e.to_string())?;
        let failures = records.iter().filter(|r| !r.correct).count() as u64;
        let breached = records.iter().filter(|r| r.breached).count() as u64;
        let mean_pulls =
            records.iter().map(|r| r.pulls as f64).sum::<f64>() / records.len() as f64;
        let (lo, hi) =
            wilson_interval(failures, u64::from(trials), 1.96).map_err(|e| e.to_string())?;
        Ok(serde_json::json!({
            "strategy": name.to_string(),
            "trials": trials,
            "failures": failures,
            "failure_rate": failures as f64 / f64::from(trials),
            "wilson_lo": lo,
            "wilson_hi": hi,
            "mean_pulls": mean_pulls,
            "breached": breached,
        })
        .to_string())
    }

    pub fn consumption_gap(dvals: &str, trials: u32, seed: u32) -> Result<String, String> {
        let d_values: Vec<f64> = dvals
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| format!("bad value: {s}")))
            .collect::<Result<_, _>>()?;
        if d_values.is_empty() {
            return Err("provide at least one d value".into());
        }
        let rows = figure_compare(&d_values, u64::from(trials), u64::from(seed))
            .map_err(|e| e.to_string())?;
        Ok(serde_json::to_string(&rows).expect("rows serialize"))
    }
}

/// Builds a catalog instance and returns its JSON.
///
/// `rewards`: onegroup|trap|polynomial|geometric; `pattern`: hmh|hml|mixture;
/// `mode`: deterministic|correlated|uncorrelated.
#[wasm_bindgen]
pub fn catalog_instance(
    arm_count: usize,
    resource_count: usize,
    rewards: &str,
    pattern: &str,
    mode: &str,
    budget: f64,
) -> Result<String, JsError> {
    api::catalog_instance(arm_count, resource_count, rewards, pattern, mode, budget)
        .map_err(|m| JsError::new(&m))
}

/// Hardness measures, rates, and failure bounds of an instance, as JSON.
#[wasm_bindgen]
pub fn complexity_report(instance_json: &str) -> Result<String, JsError> {
    api::complexity_report(instance_json).map_err(|m| JsError::new(&m))
}

/// Runs seeded trials of one strategy on an instance; returns
/// `{strategy, trials, failures, failure_rate, wilson_lo, wilson_hi,
/// mean_pulls, breached}` as JSON.
#[wasm_bindgen]
pub fn run_monte_carlo(
    instance_json: &str,
    strategy: &str,
    trials: u32,
    seed: u32,
) -> Result<String, JsError> {
    api::run_monte_carlo(instance_json, strategy, trials, seed).map_err(|m| JsError::new(&m))
}

/// Deterministic-vs-Bernoulli consumption comparison on the two-arm family
/// (capacity 2, rewards 0.5/0.4) for comma-separated mean consumptions.
/// Returns an array of `{d, setting, trials, failures, log_failure_rate}`.
#[wasm_bindgen]
pub fn consumption_gap(dvals: &str, trials: u32, seed: u32) -> Result<String, JsError> {
    api::consumption_gap(dvals, trials, seed).map_err(|m| JsError::new(&m))
}

#[cfg(test)]
mod tests {
    use super::api;

    #[test]
    fn catalog_to_report_pipeline() {
        let instance =
            api::catalog_instance(8, 1, "onegroup", "hml", "deterministic", 60.0).unwrap();
        let report = api::complexity_report(&instance).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
        assert_eq!(parsed["arm_count"], 8);
        assert!(parsed["thm1_bound"].is_number());
    }

    #[test]
    fn monte_carlo_smoke() {
        let instance =
            api::catalog_instance(4, 1, "onegroup", "hml", "uncorrelated", 40.0).unwrap();
        let result = api::run_monte_carlo(&instance, "shrr", 50, 1).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&result).unwrap();
        assert_eq!(parsed["trials"], 50);
        assert_eq!(parsed["breached"], 0);
    }

    #[test]
    fn gap_rows_cover_both_settings() {
        let rows = api::consumption_gap("0.5, 0.25", 40, 3).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&rows).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 4);
        assert_eq!(parsed[0]["setting"], "det");
        assert_eq!(parsed[1]["setting"], "sto");
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(api::complexity_report("{not json").is_err());
        assert!(api::catalog_instance(7, 1, "onegroup", "hml", "deterministic", 60.0).is_err());
        let instance =
            api::catalog_instance(4, 1, "onegroup", "hml", "deterministic", 60.0).unwrap();
        assert!(api::run_monte_carlo(&instance, "nope", 10, 1).is_err());
    }
}
