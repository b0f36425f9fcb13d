//! Command-line front end: instance generation, complexity analysis,
//! experiment execution, and the deterministic-vs-stochastic comparison.
//!
//! Exit codes: 0 on success, 1 on validation errors (flags, files, schemas),
//! 2 on runtime failures.

use bairc_core::complexity::{
    build_counterexample, build_det_lb_instance, build_sto_lb_instance, ComplexityError,
    ComplexityReport,
};
use bairc_core::harness::{
    figure_compare, figure_rows_to_csv, gen_synthetic, read_config, read_instance,
    results_to_csv, run_experiment, write_text, HarnessError, MatchPattern, RewardProfile,
    VariabilityMode,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

const VALIDATION: u8 = 1;
const RUNTIME: u8 = 2;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: VALIDATION, message: message.into() }
    }
}

impl From<HarnessError> for Failure {
    fn from(err: HarnessError) -> Self {
        let code = match err {
            HarnessError::Sim(_) => RUNTIME,
            _ => VALIDATION,
        };
        Failure { code, message: err.to_string() }
    }
}

impl From<ComplexityError> for Failure {
    fn from(err: ComplexityError) -> Self {
        Failure::validation(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "bairc",
    about = "Best-arm identification under resource constraints: simulate, analyze, compare",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark instance and write it as JSON.
    GenInstance(GenInstanceArgs),
    /// Generate a hard-family instance (reward flip with swapped top consumptions).
    GenLowerBound(GenLowerBoundArgs),
    /// Compute gaps, hardness measures, rates, and failure bounds for an instance.
    Complexity(ComplexityArgs),
    /// Run a config-driven Monte Carlo experiment and write a results CSV.
    Run(RunArgs),
    /// Compare deterministic vs Bernoulli consumption on the two-arm family.
    FigureCompare(FigureCompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RewardsArg {
    Onegroup,
    Trap,
    Poly,
    Geom,
}

impl From<RewardsArg> for RewardProfile {
    fn from(value: RewardsArg) -> Self {
        match value {
            RewardsArg::Onegroup => RewardProfile::OneGroup,
            RewardsArg::Trap => RewardProfile::Trap,
            RewardsArg::Poly => RewardProfile::Polynomial,
            RewardsArg::Geom => RewardProfile::Geometric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MatchArg {
    Hmh,
    Hml,
    M,
}

impl From<MatchArg> for MatchPattern {
    fn from(value: MatchArg) -> Self {
        match value {
            MatchArg::Hmh => MatchPattern::HmH,
            MatchArg::Hml => MatchPattern::HmL,
            MatchArg::M => MatchPattern::Mixture,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Det,
    Corr,
    Uncorr,
}

impl From<ModeArg> for VariabilityMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Det => VariabilityMode::Deterministic,
            ModeArg::Corr => VariabilityMode::Correlated,
            ModeArg::Uncorr => VariabilityMode::Uncorrelated,
        }
    }
}

#[derive(Args)]
struct GenInstanceArgs {
    /// Number of arms (even).
    #[arg(long = "K")]
    arm_count: usize,
    /// Number of resources.
    #[arg(long = "L", default_value_t = 1)]
    resource_count: usize,
    /// Reward profile.
    #[arg(long)]
    rewards: RewardsArg,
    /// Consumption pattern (how consumption lines up with reward).
    #[arg(long = "match")]
    match_pattern: MatchArg,
    /// Consumption variability.
    #[arg(long)]
    mode: ModeArg,
    /// Capacity of every resource.
    #[arg(long, default_value_t = 1500.0)]
    budget: f64,
    /// Output path for the instance JSON.
    #[arg(long)]
    out: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Det,
    Sto,
    Counterexample,
}

#[derive(Args)]
struct GenLowerBoundArgs {
    /// Which hard family to build.
    #[arg(long)]
    family: FamilyArg,
    /// Number of arms.
    #[arg(long = "K")]
    arm_count: usize,
    /// 1-based index of the arm whose reward is flipped (det/sto families).
    #[arg(long = "i", default_value_t = 1)]
    flip: usize,
    /// Number of resources (det/sto families).
    #[arg(long = "L", default_value_t = 1)]
    resource_count: usize,
    /// Capacity of every resource.
    #[arg(long, default_value_t = 100.0)]
    capacity: f64,
    /// Base rewards r_1..r_K as a comma list (default: linear from 1/2 to 1/4).
    #[arg(long = "rewards-list")]
    rewards_list: Option<String>,
    /// Sorted per-rank consumptions as a comma list, applied to every
    /// resource (default: linear from 1 down to 1/K).
    #[arg(long = "cons-list")]
    cons_list: Option<String>,
    /// Output path for the instance JSON.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Path of the instance JSON.
    #[arg(long)]
    instance: String,
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Path of the experiment config JSON.
    #[arg(long)]
    config: String,
    /// Worker threads (default: available parallelism). Never changes results.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct FigureCompareArgs {
    /// Mean consumption values, comma separated (e.g. 0.2,0.1,0.05).
    #[arg(long)]
    dvals: String,
    /// Trials per point per setting.
    #[arg(long)]
    trials: u64,
    /// Master seed.
    #[arg(long)]
    seed: u64,
    /// Output path for the comparison CSV.
    #[arg(long)]
    out: String,
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::validation(format!("--{flag}: `{s}` is not a number")))
        })
        .collect()
}

fn gen_instance(args: GenInstanceArgs) -> Result<(), Failure> {
    let instance = gen_synthetic(
        args.arm_count,
        args.resource_count,
        args.rewards.into(),
        args.match_pattern.into(),
        args.mode.into(),
        args.budget,
    )?;
    write_text(&args.out, &instance.to_json_pretty())?;
    println!("wrote instance ({} arms, {} resources) to {}", args.arm_count, args.resource_count, args.out);
    Ok(())
}

fn gen_lower_bound(args: GenLowerBoundArgs) -> Result<(), Failure> {
    let k = args.arm_count;
    let instance = match args.family {
        FamilyArg::Counterexample => build_counterexample(k, args.capacity)?,
        family => {
            if k < 2 {
                return Err(Failure::validation("--K must be at least 2"));
            }
            if !(1..=k).contains(&args.flip) {
                return Err(Failure::validation(format!("--i must lie in 1..={k}")));
            }
            let rewards = match &args.rewards_list {
                Some(text) => parse_f64_list(text, "rewards-list")?,
                None => (0..k)
                    .map(|j| 0.5 - 0.25 * j as f64 / (k as f64 - 1.0))
                    .collect(),
            };
            let sorted: Vec<f64> = match &args.cons_list {
                Some(text) => parse_f64_list(text, "cons-list")?,
                None => (0..k).map(|j| (k - j) as f64 / k as f64).collect(),
            };
            let per_resource = vec![sorted; args.resource_count];
            let capacities = vec![args.capacity; args.resource_count];
            match family {
                FamilyArg::Det => {
                    build_det_lb_instance(&rewards, &per_resource, args.flip - 1, &capacities)?
                }
                FamilyArg::Sto => {
                    build_sto_lb_instance(&rewards, &per_resource, args.flip - 1, &capacities)?
                }
                FamilyArg::Counterexample => unreachable!(),
            }
        }
    };
    write_text(&args.out, &instance.to_json_pretty())?;
    println!("wrote instance ({} arms) to {}", k, args.out);
    Ok(())
}

fn format_per_resource(label: &str, values: &Option<Vec<f64>>) -> String {
    match values {
        Some(v) => format!(
            "{label}: {}\n",
            v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
        ),
        None => String::new(),
    }
}

fn complexity(args: ComplexityArgs) -> Result<(), Failure> {
    let instance = read_instance(&args.instance)?;
    let report = ComplexityReport::for_instance(&instance)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }
    let mut text = String::new();
    text.push_str(&format!(
        "instance: {} arms, {} resources, {:?} consumption\n",
        report.arm_count, report.resource_count, report.consumption_mode
    ));
    if !report.gaps.is_empty() {
        text.push_str(&format!(
            "gaps (best-to-worst): {}\n",
            report.gaps.iter().map(|g| format!("{g:.6}")).collect::<Vec<_>>().join(", ")
        ));
    }
    text.push_str(&format_per_resource("h2_det", &report.h2_det));
    text.push_str(&format_per_resource("h2_sto", &report.h2_sto));
    text.push_str(&format_per_resource("h1_det", &report.h1_det));
    text.push_str(&format_per_resource("tilde_h1_det", &report.tilde_h1_det));
    text.push_str(&format_per_resource("tilde_h2_det", &report.tilde_h2_det));
    if let Some(g) = report.gamma_det {
        text.push_str(&format!("gamma_det: {g:.6}\n"));
    }
    if let Some(g) = report.gamma_sto {
        text.push_str(&format!("gamma_sto: {g:.6}\n"));
    }
    match report.thm1_bound {
        Some(b) => text.push_str(&format!("thm1_bound: {b:.6}\n")),
        None => text.push_str("thm1_bound: n/a (consumption not deterministic)\n"),
    }
    text.push_str(&format!("thm2_bound: {:.6}\n", report.thm2_bound));
    print!("{text}");
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let config = read_config(&args.config)?;
    let results = match args.threads {
        Some(threads) if threads > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Failure::validation(format!("--threads: {e}")))?;
            pool.install(|| run_experiment(&config))?
        }
        Some(_) => return Err(Failure::validation("--threads must be positive")),
        None => run_experiment(&config)?,
    };
    write_text(&config.output_path, &results_to_csv(&results))?;
    for r in &results {
        println!(
            "{}: {} failures / {} trials (rate {:.4}, 95% [{:.4}, {:.4}])",
            r.strategy, r.failures, r.trials, r.failure_rate, r.wilson_lo, r.wilson_hi
        );
    }
    println!("wrote {}", config.output_path);
    Ok(())
}

fn figure(args: FigureCompareArgs) -> Result<(), Failure> {
    let d_values = parse_f64_list(&args.dvals, "dvals")?;
    if d_values.is_empty() {
        return Err(Failure::validation("--dvals must list at least one value"));
    }
    let rows = figure_compare(&d_values, args.trials, args.seed)?;
    write_text(&args.out, &figure_rows_to_csv(&rows))?;
    for row in &rows {
        println!(
            "d={} {}: {} failures / {} (log rate {:.4})",
            row.d, row.setting, row.failures, row.trials, row.log_failure_rate
        );
    }
    println!("wrote {}", args.out);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenInstance(args) => gen_instance(args),
        Command::GenLowerBound(args) => gen_lower_bound(args),
        Command::Complexity(args) => complexity(args),
        Command::Run(args) => run(args),
        Command::FigureCompare(args) => figure(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => VALIDATION,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
