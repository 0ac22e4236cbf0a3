//! Command-line interface: train, simulate, calibrate, oracle, rank.
//!
//! Settings come from three layers, strongest first: command-line flags, a
//! TOML config file, built-in defaults. The seed additionally falls back to
//! the `BOUNDED_AGENTS_SEED` environment variable, then 0. Every command
//! that writes files also drops a `manifest.json` next to them recording
//! how it was invoked.
//!
//! Exit codes: 0 ok, 2 configuration, 3 dimension mismatch, 4 bad data,
//! 5 solver non-convergence, 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::calibration::{
    histogram, records_from_trace, records_to_dataset, run_calibration, simulate_trace,
    CalibrationBudget, CalibrationConfig, EmpiricalDataset, Grid, RmseTable,
};
use crate::calibration::rank_models;
use crate::checkpoint::Checkpoint;
use crate::core::{PriorSpec, Supertype};
use crate::envs::{EnvConfig, MatrixGame};
use crate::equilibrium::{cobweb_rational_price, cournot_nash, logit_qre, supply_chain_nash};
use crate::error::{Error, Result};
use crate::learner::{train, KlMode, TrainingConfig};
use crate::report::{
    selected_checkpoint_name, write_cells_csv, write_curve_csv, write_failures_csv,
    write_histogram_csv, write_summary_csv, write_trace_csv, RunManifest,
};

pub const SEED_ENV_VAR: &str = "BOUNDED_AGENTS_SEED";

#[derive(Parser)]
#[command(
    name = "bounded-agents",
    version,
    about = "Train, simulate, and calibrate populations of boundedly rational agents"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy for one environment and supertype
    Train(TrainArgs),
    /// Roll out a trained checkpoint; write decision histogram and trace
    Simulate(SimulateArgs),
    /// Grid-search supertype parameters against an empirical dataset
    Calibrate(CalibrateArgs),
    /// Analytic and fixed-point reference solutions
    Oracle(OracleArgs),
    /// Rank models from an RMSE summary table
    Rank(RankArgs),
}

/// Training settings shared by `train` and `calibrate`. Each flag
/// overrides the matching key of the config file's `[training]` table.
#[derive(Args, Clone, Default)]
struct TrainingFlags {
    /// Base settings: `desk` (150 iterations) or `reference` (500)
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Episodes collected per iteration
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gae_lambda: Option<f64>,
    #[arg(long)]
    clip_epsilon: Option<f64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Gradient passes over each batch
    #[arg(long)]
    epochs: Option<usize>,
    /// How the information cost is charged: `exact` or `per_action`
    #[arg(long)]
    kl_mode: Option<String>,
}

#[derive(Args)]
struct TrainArgs {
    /// TOML config file (tables: env, supertype, training, simulate, calibrate)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Environment: supply_chain, cournot_duopoly, cournot_triopoly, cobweb
    #[arg(long)]
    env: Option<String>,
    /// Mean rationality coefficient of the population
    #[arg(long)]
    mu: Option<f64>,
    /// Spread of the coefficient as a fraction of the mean
    #[arg(long)]
    sigma_star: Option<f64>,
    /// Prior belief: `uniform` or `prominent` (multiples of 5 boosted)
    #[arg(long)]
    prior: Option<String>,
    /// Weight multiplier for prominent numbers (with --prior prominent)
    #[arg(long)]
    boost: Option<f64>,
    #[command(flatten)]
    training: TrainingFlags,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Checkpoint written by `train` or `calibrate`
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Episodes to roll out
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write the decisions as a calibration dataset CSV
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Empirical dataset CSV (header env,subject,round,value)
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Environment override; defaults to the dataset's tag
    #[arg(long)]
    env: Option<String>,
    /// Grid axis override, e.g. --grid mu=0,0.5,1 sigma_star=0,0.25
    #[arg(long, num_args = 1..)]
    grid: Vec<String>,
    /// Prior belief for every cell: `uniform` or `prominent`
    #[arg(long)]
    prior: Option<String>,
    #[arg(long)]
    boost: Option<f64>,
    #[command(flatten)]
    training: TrainingFlags,
    /// Episodes per cell when building its decision histogram
    #[arg(long)]
    sim_episodes: Option<usize>,
    /// Model name used in the rank-ready summary row
    #[arg(long)]
    model_name: Option<String>,
    /// Worker threads for the grid (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    which: OracleCommand,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Logit quantal response fixed point of a matrix game
    Qre {
        /// rps, matching_pennies, bandit:<p0,p1,...>, or dominant:<gap>
        #[arg(long)]
        game: String,
        /// Processing-cost coefficient (temperature); must be positive
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Closed-form equilibrium decision of an economic environment
    Nash {
        /// supply_chain, cournot_duopoly, or cournot_triopoly
        #[arg(long)]
        env: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Shock-free clearing price the expectations market settles at
    CobwebStar {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RankArgs {
    /// RMSE table CSV (header model,environment,rmse_mean,rmse_std)
    #[arg(long)]
    rmse: PathBuf,
    /// Per-environment weights in table order, e.g. 1,0.5,0.5,1.
    /// Default: 0.5 for the two oligopoly settings, 1 elsewhere.
    #[arg(long)]
    weights: Option<String>,
    /// Also write rank.csv and rank.txt here
    #[arg(long)]
    out: Option<PathBuf>,
}

// -------------------------------------------------------------------------
// config file

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    seed: Option<u64>,
    /// Kept as raw TOML so `kind` alone suffices; the remaining keys
    /// overlay that kind's default parameters.
    env: Option<toml::Value>,
    supertype: SupertypeSection,
    training: TrainingSection,
    simulate: SimulateSection,
    calibrate: CalibrateSection,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct SupertypeSection {
    mu: Option<f64>,
    sigma_star: Option<f64>,
    prior: Option<PriorSpec>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct TrainingSection {
    profile: Option<String>,
    iterations: Option<usize>,
    episodes_per_iteration: Option<usize>,
    gamma: Option<f64>,
    gae_lambda: Option<f64>,
    clip_epsilon: Option<f64>,
    learning_rate: Option<f64>,
    minibatch_epochs: Option<usize>,
    kl_mode: Option<KlMode>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct SimulateSection {
    episodes: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct CalibrateSection {
    sim_episodes: Option<usize>,
    model_name: Option<String>,
    mu_values: Option<Vec<f64>>,
    sigma_star_values: Option<Vec<f64>>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let body = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&body).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw.parse().map_err(|_| {
            Error::Config(format!("{SEED_ENV_VAR}={raw:?} is not a nonnegative integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn env_kind(value: &toml::Value) -> Option<&str> {
    value.get("kind").and_then(|v| v.as_str())
}

fn env_from_value(value: &toml::Value) -> Result<EnvConfig> {
    let kind = env_kind(value)
        .ok_or_else(|| Error::Config("[env] needs a `kind` key, e.g. kind = \"cobweb\"".into()))?;
    let defaults = EnvConfig::by_name(kind)?;
    let mut merged = toml::Value::try_from(&defaults)
        .map_err(|e| Error::Config(format!("cannot serialize default parameters: {e}")))?;
    match (merged.as_table_mut(), value.as_table()) {
        (Some(dst), Some(src)) => {
            for (key, val) in src {
                dst.insert(key.clone(), val.clone());
            }
        }
        _ => return Err(Error::Config("[env] must be a table".into())),
    }
    merged.try_into().map_err(|e| Error::Config(format!("[env]: {e}")))
}

fn resolve_env(flag: Option<&str>, file: &FileConfig) -> Result<EnvConfig> {
    match (flag, &file.env) {
        // the config file's table keeps its overrides when it names the
        // same environment the flag asks for
        (Some(name), Some(value)) if env_kind(value) == Some(name) => env_from_value(value),
        (Some(name), _) => EnvConfig::by_name(name),
        (None, Some(value)) => env_from_value(value),
        (None, None) => Err(Error::Config(
            "missing `env`: pass --env or set [env] kind in the config file".into(),
        )),
    }
}

fn parse_prior(name: &str, boost: Option<f64>) -> Result<PriorSpec> {
    match name {
        "uniform" => Ok(PriorSpec::Uniform),
        "prominent" | "prominent_numbers" => {
            Ok(PriorSpec::ProminentNumbers { boost: boost.unwrap_or(3.0) })
        }
        other => Err(Error::Config(format!(
            "unknown prior `{other}` (expected uniform or prominent)"
        ))),
    }
}

fn resolve_prior(
    flag: Option<&str>,
    boost: Option<f64>,
    file: &FileConfig,
) -> Result<PriorSpec> {
    match flag {
        Some(name) => parse_prior(name, boost),
        None => Ok(file.supertype.prior.clone().unwrap_or_default()),
    }
}

fn resolve_supertype(args: &TrainArgs, file: &FileConfig) -> Result<Supertype> {
    let mu = args.mu.or(file.supertype.mu).ok_or_else(|| {
        Error::Config("missing `mu`: pass --mu or set [supertype] mu in the config file".into())
    })?;
    let sigma_star = args.sigma_star.or(file.supertype.sigma_star).ok_or_else(|| {
        Error::Config(
            "missing `sigma_star`: pass --sigma-star or set [supertype] sigma_star in the \
             config file"
                .into(),
        )
    })?;
    let prior = resolve_prior(args.prior.as_deref(), args.boost, file)?;
    Supertype::new(mu, sigma_star, prior)
}

fn build_training(flags: &TrainingFlags, file: &FileConfig, seed: u64) -> Result<TrainingConfig> {
    let section = &file.training;
    let profile = flags.profile.as_deref().or(section.profile.as_deref()).unwrap_or("desk");
    let mut cfg = match profile {
        "desk" => TrainingConfig::desk(),
        "reference" => TrainingConfig::reference(),
        other => {
            return Err(Error::Config(format!(
                "unknown profile `{other}` (expected desk or reference)"
            )))
        }
    };
    fn pick<T: Copy>(slot: &mut T, file: Option<T>, flag: Option<T>) {
        if let Some(v) = flag.or(file) {
            *slot = v;
        }
    }
    pick(&mut cfg.iterations, section.iterations, flags.iterations);
    pick(&mut cfg.episodes_per_iteration, section.episodes_per_iteration, flags.episodes);
    pick(&mut cfg.gamma, section.gamma, flags.gamma);
    pick(&mut cfg.gae_lambda, section.gae_lambda, flags.gae_lambda);
    pick(&mut cfg.clip_epsilon, section.clip_epsilon, flags.clip_epsilon);
    pick(&mut cfg.learning_rate, section.learning_rate, flags.learning_rate);
    pick(&mut cfg.minibatch_epochs, section.minibatch_epochs, flags.epochs);
    let flag_mode = flags
        .kl_mode
        .as_deref()
        .map(|raw| match raw {
            "exact" => Ok(KlMode::Exact),
            "per_action" => Ok(KlMode::PerAction),
            other => Err(Error::Config(format!(
                "unknown kl_mode `{other}` (expected exact or per_action)"
            ))),
        })
        .transpose()?;
    pick(&mut cfg.kl_mode, section.kl_mode, flag_mode);
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{what}: `{tok}` is not a number")))
        })
        .collect()
}

fn build_grid(specs: &[String], section: &CalibrateSection) -> Result<Grid> {
    let mut grid = Grid::default();
    if let Some(v) = &section.mu_values {
        grid.mu_values = v.clone();
    }
    if let Some(v) = &section.sigma_star_values {
        grid.sigma_star_values = v.clone();
    }
    for spec in specs {
        let (axis, raw) = spec.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "grid spec `{spec}` must look like mu=0,0.5,1 or sigma_star=0,0.25"
            ))
        })?;
        let mut values = parse_f64_list(raw, "grid values")?;
        values.sort_by(|a, b| a.total_cmp(b));
        values.dedup();
        match axis.trim() {
            "mu" => grid.mu_values = values,
            "sigma_star" => grid.sigma_star_values = values,
            other => {
                return Err(Error::Config(format!(
                    "unknown grid axis `{other}` (expected mu or sigma_star)"
                )))
            }
        }
    }
    grid.validate()?;
    Ok(grid)
}

// -------------------------------------------------------------------------
// commands

fn cmd_train(args: &TrainArgs, argv: &[String]) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let seed = resolve_seed(args.seed, file.seed)?;
    let env_cfg = resolve_env(args.env.as_deref(), &file)?;
    let supertype = resolve_supertype(args, &file)?;
    let training = build_training(&args.training, &file, seed)?;
    let mut env = env_cfg.build()?;
    let output = train(&mut env, std::slice::from_ref(&supertype), &training)?;
    fs::create_dir_all(&args.out)?;
    let ckpt = Checkpoint::from_training(env_cfg.clone(), vec![supertype], seed, &output);
    let ckpt_path = args.out.join("checkpoint.json");
    ckpt.save(&ckpt_path)?;
    write_curve_csv(&args.out.join("curve.csv"), &output.curve)?;
    RunManifest::new(argv, args.config.as_deref(), seed, &args.out)
        .save(&args.out.join("manifest.json"))?;
    let last = output.curve.last().expect("at least one iteration");
    println!(
        "trained {} for {} iterations, {} episodes each (seed {seed})",
        env_cfg.name(),
        training.iterations,
        training.episodes_per_iteration
    );
    println!(
        "final batch: mean utility {:.4}, mean divergence {:.4}, mean regularized reward {:.4}",
        last.mean_raw_utility, last.mean_kl_penalty, last.mean_regularized_reward
    );
    for note in env.diagnostics() {
        println!("note: {note}");
    }
    println!("checkpoint: {}", ckpt_path.display());
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, argv: &[String]) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let seed = resolve_seed(args.seed, file.seed)?;
    let episodes = args.episodes.or(file.simulate.episodes).unwrap_or(500);
    if episodes == 0 {
        return Err(Error::Config("episodes must be at least 1".into()));
    }
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let policy = ckpt.policy()?;
    let mut env = ckpt.env.build()?;
    let trace = simulate_trace(&policy, &mut env, &ckpt.supertypes, episodes, seed)?;
    let record_prices = ckpt.env.records_prices();
    let records = records_from_trace(&trace, record_prices)?;
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    let space = env.action_space().clone();
    let masses = histogram(&values, &space, record_prices)?;
    fs::create_dir_all(&args.out)?;
    write_histogram_csv(&args.out.join("histogram.csv"), &space, &masses)?;
    write_trace_csv(&args.out.join("trace.csv"), &trace)?;
    if let Some(dataset_path) = &args.dataset {
        if let Some(parent) = dataset_path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        let dataset = records_to_dataset(ckpt.env.name(), &records)?;
        dataset.save_csv(dataset_path)?;
        println!("dataset with {} decisions written to {}", records.len(), dataset_path.display());
    }
    RunManifest::new(argv, args.config.as_deref(), seed, &args.out)
        .save(&args.out.join("manifest.json"))?;
    println!(
        "simulated {} episodes of {} (seed {seed}); histogram over {} values",
        episodes,
        ckpt.env.name(),
        values.len()
    );
    for note in env.diagnostics() {
        println!("note: {note}");
    }
    Ok(())
}

fn cmd_calibrate(args: &CalibrateArgs, argv: &[String]) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let seed = resolve_seed(args.seed, file.seed)?;
    let dataset = EmpiricalDataset::load_csv(&args.dataset)?;
    let env_cfg = if args.env.is_some() || file.env.is_some() {
        resolve_env(args.env.as_deref(), &file)?
    } else {
        EnvConfig::by_name(dataset.env())?
    };
    let grid = build_grid(&args.grid, &file.calibrate)?;
    let training = build_training(&args.training, &file, 0)?;
    let sim_episodes = args.sim_episodes.or(file.calibrate.sim_episodes).unwrap_or(500);
    if sim_episodes == 0 {
        return Err(Error::Config("sim_episodes must be at least 1".into()));
    }
    let prior = resolve_prior(args.prior.as_deref(), args.boost, &file)?;
    let cfg = CalibrationConfig {
        env: env_cfg,
        grid,
        budget: CalibrationBudget { training, sim_episodes },
        prior,
        seed,
    };
    let report = match args.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            pool.install(|| run_calibration(&dataset, &cfg))?
        }
        None => run_calibration(&dataset, &cfg)?,
    };
    fs::create_dir_all(&args.out)?;
    write_cells_csv(&args.out.join("cells.csv"), &report)?;
    let model_name = args
        .model_name
        .clone()
        .or_else(|| file.calibrate.model_name.clone())
        .unwrap_or_else(|| "bounded_agents".into());
    write_summary_csv(&args.out.join("summary.csv"), &model_name, &report)?;
    if !report.failures.is_empty() {
        write_failures_csv(&args.out.join("failures.csv"), &report)?;
    }
    for sel in &report.selected {
        sel.checkpoint
            .save(&args.out.join(selected_checkpoint_name(sel.repetition, sel.direction)))?;
    }
    RunManifest::new(argv, args.config.as_deref(), seed, &args.out)
        .save(&args.out.join("manifest.json"))?;
    println!(
        "calibrated {} against {} observations over {} grid cells (seed {seed})",
        report.env_name,
        dataset.len(),
        cfg.grid.num_cells()
    );
    for sel in &report.selected {
        println!(
            "repetition {} fold {}: mu {}, sigma_star {} (train MSE {:.6}, test RMSE {:.6})",
            sel.repetition, sel.direction, sel.mu, sel.sigma_star, sel.train_mse, sel.test_rmse
        );
    }
    if !report.failures.is_empty() {
        println!("warning: {} grid cells failed; see failures.csv", report.failures.len());
    }
    let summary = report.rmse_summary();
    println!("held-out RMSE: {:.6} \u{b1} {:.6}", summary.mean, summary.std);
    Ok(())
}

fn parse_game(raw: &str) -> Result<MatrixGame> {
    if let Some(spec) = raw.strip_prefix("bandit:") {
        return MatrixGame::bandit(parse_f64_list(spec, "bandit payoffs")?);
    }
    if let Some(spec) = raw.strip_prefix("dominant:") {
        let gap: f64 = spec
            .parse()
            .map_err(|_| Error::Config(format!("dominant gap `{spec}` is not a number")))?;
        return MatrixGame::dominant_action(gap);
    }
    match raw {
        "rps" | "rock_paper_scissors" => Ok(MatrixGame::rock_paper_scissors()),
        "matching_pennies" | "pennies" => Ok(MatrixGame::matching_pennies()),
        other => Err(Error::Config(format!(
            "unknown game `{other}` (expected rps, matching_pennies, bandit:<payoffs>, or \
             dominant:<gap>)"
        ))),
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    match &args.which {
        OracleCommand::Qre { game, lambda, tol, max_iter } => {
            let game = parse_game(game)?;
            let solution = logit_qre(&game, *lambda, *tol, *max_iter)?;
            for (i, mix) in solution.strategies.iter().enumerate() {
                let cells: Vec<String> = mix.iter().map(|p| format!("{p:.6}")).collect();
                println!("player {i}: {}", cells.join(" "));
            }
            println!("residual: {:e} after {} iterations", solution.residual, solution.iterations);
        }
        OracleCommand::Nash { env, config } => {
            let file = load_file_config(config.as_deref())?;
            let cfg = resolve_env(Some(env), &file)?;
            let value = match &cfg {
                EnvConfig::CournotDuopoly(c) | EnvConfig::CournotTriopoly(c) => cournot_nash(c)?,
                EnvConfig::SupplyChain(c) => supply_chain_nash(c)?,
                EnvConfig::Cobweb(_) => {
                    return Err(Error::Config(
                        "the expectations market has no single-decision equilibrium; use \
                         `oracle cobweb-star` for its price"
                            .into(),
                    ))
                }
            };
            println!("nash({}) = {value}", cfg.name());
        }
        OracleCommand::CobwebStar { config } => {
            let file = load_file_config(config.as_deref())?;
            let cfg = match resolve_env(Some("cobweb"), &file)? {
                EnvConfig::Cobweb(c) => c,
                other => {
                    return Err(Error::Config(format!(
                        "config file sets up {}, not the expectations market",
                        other.name()
                    )))
                }
            };
            let price = cobweb_rational_price(&cfg)?;
            let supplied = cfg.supply(price) * cfg.producers as f64;
            let residual = (cfg.demand_intercept - cfg.demand_slope * price - supplied).abs();
            println!("p* = {price}");
            println!("residual: {residual:e}");
        }
    }
    Ok(())
}

fn default_weight(environment: &str) -> f64 {
    match environment {
        "cournot_duopoly" | "cournot_triopoly" => 0.5,
        _ => 1.0,
    }
}

fn cmd_rank(args: &RankArgs, argv: &[String]) -> Result<()> {
    let table = RmseTable::load_csv(&args.rmse)?;
    let weights = match &args.weights {
        Some(raw) => {
            let w = parse_f64_list(raw, "weights")?;
            if w.len() != table.environments.len() {
                return Err(Error::Config(format!(
                    "{} weights for {} environments ({})",
                    w.len(),
                    table.environments.len(),
                    table.environments.join(", ")
                )));
            }
            w
        }
        None => table.environments.iter().map(|e| default_weight(e)).collect(),
    };
    let ranked = rank_models(&table, &weights)?;
    print!("{}", ranked.render_text());
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
        fs::write(out.join("rank.csv"), ranked.to_csv())?;
        fs::write(out.join("rank.txt"), ranked.render_text())?;
        RunManifest::new(argv, None, 0, out).save(&out.join("manifest.json"))?;
    }
    Ok(())
}

/// Parses the argument vector and runs the chosen command. Returns the
/// process exit code; errors are printed to stderr.
pub fn main_entry(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Train(args) => cmd_train(args, &argv),
        Command::Simulate(args) => cmd_simulate(args, &argv),
        Command::Calibrate(args) => cmd_calibrate(args, &argv),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Rank(args) => cmd_rank(args, &argv),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
