//! Fitting supertype parameters to observed decision data.
//!
//! The procedure mirrors a standard model-selection loop: split the
//! empirical data into matched halves five times, train one policy per
//! (mu, sigma_star) grid cell, score each cell's simulated decision
//! histogram against the training half with mean squared error, pick the
//! argmin, and report its RMSE on the held-out half. Every cell is trained
//! once per repetition and reused for both fold directions.

mod dataset;
mod rank;

pub use dataset::{EmpiricalDataset, Observation};
pub use rank::{rank_models, RankTable, RmseCell, RmseTable};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::checkpoint::Checkpoint;
use crate::core::{ActionSpace, PriorSpec, Supertype};
use crate::envs::{EnvConfig, Environment};
use crate::error::{Error, Result};
use crate::learner::{check_supertypes, train, TrainingConfig};
use crate::policy::{encode_observation, observation_len, Policy};
use crate::rng::{derive_seed, stream};

const TAG_SIMULATE: u64 = 3;
const TAG_FOLD: u64 = 4;
const TAG_CELL_TRAIN: u64 = 5;
const TAG_CELL_SIM: u64 = 6;

/// Bins values into a probability vector over the action grid. With
/// `bin_to_nearest` off-grid values (realized prices) snap to the closest
/// bin; without it they are rejected.
pub fn histogram(values: &[f64], space: &ActionSpace, bin_to_nearest: bool) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::data("cannot build a histogram from zero values"));
    }
    let mut counts = vec![0u64; space.len()];
    for &v in values {
        if !v.is_finite() {
            return Err(Error::data(format!("non-finite value {v} in histogram input")));
        }
        let idx = if bin_to_nearest {
            space.nearest_index(v)
        } else {
            space.index_of(v).ok_or_else(|| {
                Error::data(format!("value {v} is not on the action grid"))
            })?
        };
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Mean over bins of the squared mass difference.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "histogram lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Dimension("histograms are empty".into()));
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

/// The (mu, sigma_star) search grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub mu_values: Vec<f64>,
    pub sigma_star_values: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            mu_values: vec![0.0, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0],
            sigma_star_values: vec![0.0, 0.05, 0.1, 0.25, 0.5, 1.0],
        }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, values: &[f64], max: f64| -> Result<()> {
            if values.is_empty() {
                return Err(Error::Config(format!("{name} grid axis is empty")));
            }
            for w in values.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(Error::Config(format!(
                        "{name} grid values must be strictly increasing, got {values:?}"
                    )));
                }
            }
            for &v in values {
                if !v.is_finite() || v < 0.0 || v > max {
                    return Err(Error::Config(format!(
                        "{name} grid value {v} outside [0, {max}]"
                    )));
                }
            }
            Ok(())
        };
        check("mu", &self.mu_values, f64::INFINITY)?;
        check("sigma_star", &self.sigma_star_values, 1.0)
    }

    pub fn num_cells(&self) -> usize {
        self.mu_values.len() * self.sigma_star_values.len()
    }

    /// Cells in (mu ascending, sigma_star ascending) order, so an argmin
    /// scan that keeps the first minimum implements the tie rule: smaller
    /// mu first, then smaller sigma_star.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.num_cells());
        for &mu in &self.mu_values {
            for &s in &self.sigma_star_values {
                out.push((mu, s));
            }
        }
        out
    }

    /// Grid-index coordinates of a cell, when its values lie on the axes.
    pub fn position(&self, mu: f64, sigma_star: f64) -> Option<(usize, usize)> {
        let mi = self.mu_values.iter().position(|&v| v == mu)?;
        let si = self.sigma_star_values.iter().position(|&v| v == sigma_star)?;
        Some((mi, si))
    }
}

/// Five repetitions of a two-way split of observation indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub halves: Vec<(Vec<usize>, Vec<usize>)>,
    pub seed: u64,
}

pub const FOLD_REPETITIONS: usize = 5;

/// Shuffles the observation indices five times and halves each shuffle.
/// With an odd count the first half gets the extra observation.
pub fn split_5x2(dataset: &EmpiricalDataset, seed: u64) -> Result<FoldPlan> {
    let n = dataset.len();
    if n < 2 {
        return Err(Error::data(format!(
            "need at least 2 observations to split, dataset has {n}"
        )));
    }
    let mut halves = Vec::with_capacity(FOLD_REPETITIONS);
    for rep in 0..FOLD_REPETITIONS {
        let mut indices: Vec<usize> = (0..n).collect();
        let mut rng = stream(seed, &[TAG_FOLD, rep as u64]);
        indices.shuffle(&mut rng);
        let cut = n.div_ceil(2);
        let (a, b) = indices.split_at(cut);
        halves.push((a.to_vec(), b.to_vec()));
    }
    Ok(FoldPlan { halves, seed })
}

/// One agent-step of a frozen-policy rollout, with everything a trace
/// file needs.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub episode: usize,
    pub step: usize,
    pub agent: usize,
    pub lambda: f64,
    /// The decision in grid units (a quantity, an order, a prediction).
    pub action_value: f64,
    pub utility: f64,
    /// Market price realized at this step, where the environment has one;
    /// repeated on every agent's row for the step.
    pub price: Option<f64>,
}

/// Runs `n_episodes` rollouts with the policy frozen, drawing fresh
/// rationality coefficients per episode, and logs every agent-step.
pub fn simulate_trace(
    policy: &Policy,
    env: &mut dyn Environment,
    supertypes: &[Supertype],
    n_episodes: usize,
    seed: u64,
) -> Result<Vec<TraceRow>> {
    let num_agents = env.num_agents();
    check_supertypes(supertypes, num_agents)?;
    let space = env.action_space().clone();
    let expected_obs = observation_len(env.env_feature_len(), space.len());
    if policy.obs_len() != expected_obs || policy.n_actions() != space.len() {
        return Err(Error::Dimension(format!(
            "policy expects {} inputs and {} actions; environment needs {} and {}",
            policy.obs_len(),
            policy.n_actions(),
            expected_obs,
            space.len()
        )));
    }
    let pick = |i: usize| if supertypes.len() == 1 { &supertypes[0] } else { &supertypes[i] };
    let priors: Vec<_> =
        (0..num_agents).map(|i| pick(i).prior(&space)).collect::<Result<_>>()?;
    let mut rng = stream(seed, &[TAG_SIMULATE]);
    let mut rows = Vec::new();
    for episode in 0..n_episodes {
        let lambdas: Vec<f64> = (0..num_agents).map(|i| pick(i).sample_lambda(&mut rng)).collect();
        env.reset();
        for step in 0..env.horizon() {
            let mut actions = Vec::with_capacity(num_agents);
            for i in 0..num_agents {
                let obs = encode_observation(
                    &env.env_features(i),
                    i,
                    num_agents,
                    lambdas[i],
                    &priors[i],
                );
                actions.push(policy.forward(&obs)?.sample(&mut rng));
            }
            let outcome = env.step(&actions, &mut rng)?;
            if outcome.utilities.len() != num_agents {
                return Err(Error::Dimension(format!(
                    "environment returned {} utilities for {num_agents} agents",
                    outcome.utilities.len()
                )));
            }
            for (i, &a) in actions.iter().enumerate() {
                rows.push(TraceRow {
                    episode,
                    step,
                    agent: i,
                    lambda: lambdas[i],
                    action_value: space.value(a),
                    utility: outcome.utilities[i],
                    price: outcome.price,
                });
            }
            if outcome.done {
                break;
            }
        }
    }
    Ok(rows)
}

/// One recorded value from a frozen-policy rollout: an agent's decision,
/// or (with `agent` empty) the market price realized at that step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub episode: usize,
    pub step: usize,
    pub agent: Option<usize>,
    pub value: f64,
}

/// Reduces a trace to the values a histogram is built from: every agent's
/// decision, or the realized price once per step.
pub fn records_from_trace(trace: &[TraceRow], record_prices: bool) -> Result<Vec<SimRecord>> {
    let mut records = Vec::new();
    for row in trace {
        if record_prices {
            if row.agent != 0 {
                continue;
            }
            let price = row.price.ok_or_else(|| {
                Error::data("asked to record prices from an environment without a price")
            })?;
            records.push(SimRecord {
                episode: row.episode,
                step: row.step,
                agent: None,
                value: price,
            });
        } else {
            records.push(SimRecord {
                episode: row.episode,
                step: row.step,
                agent: Some(row.agent),
                value: row.action_value,
            });
        }
    }
    Ok(records)
}

/// Like `simulate_trace`, reduced straight to histogram-ready records.
pub fn simulate_records(
    policy: &Policy,
    env: &mut dyn Environment,
    supertypes: &[Supertype],
    record_prices: bool,
    n_episodes: usize,
    seed: u64,
) -> Result<Vec<SimRecord>> {
    let trace = simulate_trace(policy, env, supertypes, n_episodes, seed)?;
    records_from_trace(&trace, record_prices)
}

/// Packs simulation records into the empirical-dataset shape, so synthetic
/// data flows through the same files and folds as recorded data.
pub fn records_to_dataset(env_name: &str, records: &[SimRecord]) -> Result<EmpiricalDataset> {
    let observations = records
        .iter()
        .map(|r| Observation {
            subject: match r.agent {
                Some(a) => format!("e{}a{a}", r.episode),
                None => format!("e{}", r.episode),
            },
            round: r.step as u64,
            value: r.value,
        })
        .collect();
    EmpiricalDataset::new(env_name, observations)
}

/// Frozen-policy rollouts aggregated straight to a histogram, using the
/// environment and supertypes stored in the checkpoint.
pub fn simulate_distribution(
    ckpt: &Checkpoint,
    n_episodes: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    ckpt.validate()?;
    let policy = ckpt.policy()?;
    let mut env = ckpt.env.build()?;
    let record_prices = ckpt.env.records_prices();
    let records =
        simulate_records(&policy, &mut env, &ckpt.supertypes, record_prices, n_episodes, seed)?;
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    histogram(&values, env.action_space(), record_prices)
}

/// Training budget for one grid cell plus the rollout count used to build
/// its simulated histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationBudget {
    pub training: TrainingConfig,
    pub sim_episodes: usize,
}

impl Default for CalibrationBudget {
    fn default() -> Self {
        CalibrationBudget { training: TrainingConfig::desk(), sim_episodes: 500 }
    }
}

/// A scored grid cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub mu: f64,
    pub sigma_star: f64,
    /// Seed the cell's policy was trained with.
    pub seed: u64,
    pub train_mse: f64,
    /// RMSE on the held-out half, once `evaluate` has run.
    pub test_rmse: Option<f64>,
    /// The trained policy, packaged for reuse or saving.
    pub checkpoint: Checkpoint,
    pub sim_histogram: Vec<f64>,
}

/// A cell whose training or simulation failed; recorded, never fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub repetition: usize,
    pub mu: f64,
    pub sigma_star: f64,
    pub seed: u64,
    pub message: String,
}

fn train_cell(
    env_cfg: &EnvConfig,
    mu: f64,
    sigma_star: f64,
    prior: &PriorSpec,
    budget: &CalibrationBudget,
    train_seed: u64,
    sim_seed: u64,
) -> Result<(Checkpoint, Vec<f64>)> {
    let supertype = Supertype::new(mu, sigma_star, prior.clone())?;
    let mut env = env_cfg.build()?;
    let cfg = TrainingConfig { seed: train_seed, ..budget.training.clone() };
    let output = train(&mut env, std::slice::from_ref(&supertype), &cfg)?;
    let ckpt = Checkpoint::from_training(env_cfg.clone(), vec![supertype], train_seed, &output);
    let hist = simulate_distribution(&ckpt, budget.sim_episodes, sim_seed)?;
    Ok((ckpt, hist))
}

/// Trains and simulates every grid cell for one repetition, in parallel.
/// Returns per-cell outcomes in grid order.
#[allow(clippy::type_complexity)]
fn train_repetition_cells(
    env_cfg: &EnvConfig,
    grid: &Grid,
    budget: &CalibrationBudget,
    prior: &PriorSpec,
    seed: u64,
    repetition: usize,
) -> Vec<(f64, f64, u64, std::result::Result<(Checkpoint, Vec<f64>), String>)> {
    let cells = grid.cells();
    cells
        .par_iter()
        .enumerate()
        .map(|(cell_idx, &(mu, sigma_star))| {
            let train_seed =
                derive_seed(seed, &[TAG_CELL_TRAIN, repetition as u64, cell_idx as u64]);
            let sim_seed = derive_seed(seed, &[TAG_CELL_SIM, repetition as u64, cell_idx as u64]);
            let outcome = train_cell(env_cfg, mu, sigma_star, prior, budget, train_seed, sim_seed)
                .map_err(|e| e.to_string());
            (mu, sigma_star, train_seed, outcome)
        })
        .collect()
}

/// Scores pre-simulated cells against a training-half histogram and picks
/// the argmin; ties resolve toward smaller mu, then smaller sigma_star.
fn select_best(
    cells: &[(f64, f64, u64, std::result::Result<(Checkpoint, Vec<f64>), String>)],
    train_hist: &[f64],
) -> Result<(usize, Vec<CellResult>)> {
    let mut results = Vec::new();
    for (mu, sigma_star, seed, outcome) in cells {
        if let Ok((ckpt, hist)) = outcome {
            results.push(CellResult {
                mu: *mu,
                sigma_star: *sigma_star,
                seed: *seed,
                train_mse: mse(hist, train_hist)?,
                test_rmse: None,
                checkpoint: ckpt.clone(),
                sim_histogram: hist.clone(),
            });
        }
    }
    if results.is_empty() {
        return Err(Error::data("every grid cell failed to train"));
    }
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.train_mse < results[best].train_mse {
            best = i;
        }
    }
    Ok((best, results))
}

/// Single-fold grid search: trains all cells, scores them on the training
/// half, returns the winner's index plus every completed cell and the
/// failures.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    env_cfg: &EnvConfig,
    dataset: &EmpiricalDataset,
    train_indices: &[usize],
    grid: &Grid,
    budget: &CalibrationBudget,
    prior: &PriorSpec,
    seed: u64,
    repetition: usize,
) -> Result<(usize, Vec<CellResult>, Vec<CellFailure>)> {
    grid.validate()?;
    budget.training.validate()?;
    let env = env_cfg.build()?;
    let space = env.action_space().clone();
    let bin = env_cfg.records_prices();
    let train_hist = histogram(&dataset.values_at(train_indices)?, &space, bin)?;
    let cells = train_repetition_cells(env_cfg, grid, budget, prior, seed, repetition);
    let failures = cells
        .iter()
        .filter_map(|(mu, sigma_star, seed, outcome)| {
            outcome.as_ref().err().map(|message| CellFailure {
                repetition,
                mu: *mu,
                sigma_star: *sigma_star,
                seed: *seed,
                message: message.clone(),
            })
        })
        .collect();
    let (best, results) = select_best(&cells, &train_hist)?;
    Ok((best, results, failures))
}

/// Held-out score for one cell's simulated histogram. Aborts if the folds
/// share an observation.
pub fn evaluate(
    sim_histogram: &[f64],
    dataset: &EmpiricalDataset,
    train_indices: &[usize],
    test_indices: &[usize],
    space: &ActionSpace,
    bin_to_nearest: bool,
) -> Result<f64> {
    let train_set: std::collections::HashSet<usize> = train_indices.iter().copied().collect();
    if let Some(shared) = test_indices.iter().find(|i| train_set.contains(i)) {
        return Err(Error::data(format!(
            "folds overlap: observation {shared} appears in both halves"
        )));
    }
    let test_hist = histogram(&dataset.values_at(test_indices)?, space, bin_to_nearest)?;
    Ok(mse(sim_histogram, &test_hist)?.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    pub env: EnvConfig,
    pub grid: Grid,
    pub budget: CalibrationBudget,
    pub prior: PriorSpec,
    pub seed: u64,
}

/// One scored (repetition, fold direction, cell) row.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldScore {
    pub repetition: usize,
    /// 0: first half trains, second tests; 1: the reverse.
    pub direction: usize,
    pub mu: f64,
    pub sigma_star: f64,
    pub seed: u64,
    pub train_mse: f64,
    pub test_rmse: f64,
    pub selected: bool,
}

/// The winning cell of one (repetition, direction) search, with its policy.
#[derive(Debug, Clone)]
pub struct SelectedCell {
    pub repetition: usize,
    pub direction: usize,
    pub mu: f64,
    pub sigma_star: f64,
    pub seed: u64,
    pub train_mse: f64,
    pub test_rmse: f64,
    pub checkpoint: Checkpoint,
}

#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub env_name: String,
    pub rows: Vec<FoldScore>,
    pub failures: Vec<CellFailure>,
    pub selected: Vec<SelectedCell>,
}

impl CalibrationReport {
    /// Mean and standard deviation of the held-out RMSE over all selected
    /// cells (two per repetition), ready for the rank table.
    pub fn rmse_summary(&self) -> RmseCell {
        let scores: Vec<f64> = self.selected.iter().map(|s| s.test_rmse).collect();
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        let var =
            scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / scores.len() as f64;
        RmseCell { mean, std: var.sqrt() }
    }
}

/// The full search: five two-way splits, one grid of trained cells per
/// repetition (shared by both fold directions), selection on the training
/// half, held-out RMSE for every completed cell.
pub fn run_calibration(
    dataset: &EmpiricalDataset,
    cfg: &CalibrationConfig,
) -> Result<CalibrationReport> {
    cfg.grid.validate()?;
    cfg.budget.training.validate()?;
    if dataset.env() != cfg.env.name() {
        return Err(Error::data(format!(
            "dataset is tagged {:?} but the run targets {:?}",
            dataset.env(),
            cfg.env.name()
        )));
    }
    let env = cfg.env.build()?;
    let space = env.action_space().clone();
    let bin = cfg.env.records_prices();
    let plan = split_5x2(dataset, cfg.seed)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut selected = Vec::new();
    for (repetition, (first, second)) in plan.halves.iter().enumerate() {
        let cells =
            train_repetition_cells(&cfg.env, &cfg.grid, &cfg.budget, &cfg.prior, cfg.seed, repetition);
        for (mu, sigma_star, seed, outcome) in &cells {
            if let Err(message) = outcome {
                failures.push(CellFailure {
                    repetition,
                    mu: *mu,
                    sigma_star: *sigma_star,
                    seed: *seed,
                    message: message.clone(),
                });
            }
        }
        for direction in 0..2 {
            let (train_idx, test_idx) =
                if direction == 0 { (first, second) } else { (second, first) };
            let train_hist = histogram(&dataset.values_at(train_idx)?, &space, bin)?;
            let (best, results) = select_best(&cells, &train_hist)?;
            for (i, cell) in results.iter().enumerate() {
                let test_rmse =
                    evaluate(&cell.sim_histogram, dataset, train_idx, test_idx, &space, bin)?;
                rows.push(FoldScore {
                    repetition,
                    direction,
                    mu: cell.mu,
                    sigma_star: cell.sigma_star,
                    seed: cell.seed,
                    train_mse: cell.train_mse,
                    test_rmse,
                    selected: i == best,
                });
                if i == best {
                    selected.push(SelectedCell {
                        repetition,
                        direction,
                        mu: cell.mu,
                        sigma_star: cell.sigma_star,
                        seed: cell.seed,
                        train_mse: cell.train_mse,
                        test_rmse,
                        checkpoint: cell.checkpoint.clone(),
                    });
                }
            }
        }
    }
    Ok(CalibrationReport { env_name: cfg.env.name().to_string(), rows, failures, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cournot_space() -> ActionSpace {
        EnvConfig::by_name("cournot_duopoly").unwrap().action_space().unwrap()
    }

    #[test]
    fn histogram_point_mass_and_extremes() {
        let space = cournot_space();
        let h = histogram(&[20.0; 10], &space, false).unwrap();
        assert_eq!(h[space.index_of(20.0).unwrap()], 1.0);
        assert_eq!(h.iter().sum::<f64>(), 1.0);
        let h = histogram(&[8.0, 32.0], &space, false).unwrap();
        assert_eq!(h[0], 0.5);
        assert_eq!(h[space.len() - 1], 0.5);
    }

    #[test]
    fn histogram_rejects_off_grid_without_binning() {
        let space = cournot_space();
        assert!(histogram(&[20.5], &space, false).is_err());
        let h = histogram(&[20.4], &space, true).unwrap();
        assert_eq!(h[space.index_of(20.0).unwrap()], 1.0);
    }

    proptest! {
        #[test]
        fn histogram_masses_sum_to_one(values in proptest::collection::vec(8.0f64..32.0, 1..200)) {
            let space = cournot_space();
            let h = histogram(&values, &space, true).unwrap();
            prop_assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(h.iter().all(|&m| m >= 0.0));
        }
    }

    #[test]
    fn mse_hand_cases() {
        assert_eq!(mse(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let a = [0.1, 0.5, 0.4];
        let b = [0.2, 0.3, 0.5];
        assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
        assert!(mse(&a, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn default_grid_is_seven_by_six() {
        let grid = Grid::default();
        assert_eq!(grid.num_cells(), 42);
        assert_eq!(grid.mu_values, vec![0.0, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0]);
        assert_eq!(grid.sigma_star_values, vec![0.0, 0.05, 0.1, 0.25, 0.5, 1.0]);
        grid.validate().unwrap();
        let cells = grid.cells();
        assert_eq!(cells[0], (0.0, 0.0));
        assert_eq!(cells[1], (0.0, 0.05));
        assert_eq!(cells.last(), Some(&(10.0, 1.0)));
    }

    #[test]
    fn bad_grids_rejected() {
        let mut g = Grid::default();
        g.sigma_star_values = vec![0.0, 1.5];
        assert!(g.validate().is_err());
        g.sigma_star_values = vec![0.5, 0.5];
        assert!(g.validate().is_err());
        g.sigma_star_values = vec![];
        assert!(g.validate().is_err());
        let mut g = Grid::default();
        g.mu_values = vec![1.0, 0.5];
        assert!(g.validate().is_err());
    }

    fn toy_dataset(n: usize) -> EmpiricalDataset {
        EmpiricalDataset::new(
            "cournot_duopoly",
            (0..n)
                .map(|i| Observation {
                    subject: format!("s{i}"),
                    round: 0,
                    value: 8.0 + (i % 25) as f64,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn split_halves_partition_and_balance() {
        for n in [30, 31] {
            let plan = split_5x2(&toy_dataset(n), 9).unwrap();
            assert_eq!(plan.halves.len(), 5);
            for (a, b) in &plan.halves {
                assert_eq!(a.len(), n.div_ceil(2));
                assert_eq!(b.len(), n / 2);
                let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
                all.sort_unstable();
                assert_eq!(all, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn split_is_seeded_and_too_small_rejected() {
        let ds = toy_dataset(20);
        assert_eq!(split_5x2(&ds, 4).unwrap(), split_5x2(&ds, 4).unwrap());
        assert_ne!(split_5x2(&ds, 4).unwrap().halves, split_5x2(&ds, 5).unwrap().halves);
        let one = EmpiricalDataset::new(
            "cournot_duopoly",
            vec![Observation { subject: "s".into(), round: 0, value: 20.0 }],
        )
        .unwrap();
        assert!(split_5x2(&one, 0).is_err());
    }

    #[test]
    fn evaluate_rejects_overlapping_folds() {
        let ds = toy_dataset(10);
        let space = cournot_space();
        let hist = vec![1.0 / space.len() as f64; space.len()];
        let err = evaluate(&hist, &ds, &[0, 1, 2], &[2, 3], &space, false).unwrap_err();
        assert!(err.to_string().contains("overlap"), "got: {err}");
        assert_eq!(err.exit_code(), 4);
        evaluate(&hist, &ds, &[0, 1, 2], &[3, 4], &space, false).unwrap();
    }

    #[test]
    fn evaluate_is_zero_on_matching_histograms() {
        let ds = EmpiricalDataset::new(
            "cournot_duopoly",
            (0..4)
                .map(|i| Observation { subject: format!("s{i}"), round: 0, value: 20.0 })
                .collect(),
        )
        .unwrap();
        let space = cournot_space();
        let mut sim = vec![0.0; space.len()];
        sim[space.index_of(20.0).unwrap()] = 1.0;
        let rmse = evaluate(&sim, &ds, &[0, 1], &[2, 3], &space, false).unwrap();
        assert_eq!(rmse, 0.0);
    }

    #[test]
    fn simulation_records_are_deterministic_and_on_grid() {
        let env_cfg = EnvConfig::by_name("cournot_duopoly").unwrap();
        let types = [Supertype::new(1.0, 0.5, PriorSpec::Uniform).unwrap()];
        let mut rng = stream(2, &[]);
        let space = env_cfg.action_space().unwrap();
        let policy =
            Policy::init(observation_len(0, space.len()), space.len(), &mut rng).unwrap();
        let run = || {
            let mut env = env_cfg.build().unwrap();
            simulate_records(&policy, &mut env, &types, false, 20, 77).unwrap()
        };
        let records = run();
        assert_eq!(records, run());
        assert_eq!(records.len(), 20 * 2);
        for r in &records {
            assert!(space.index_of(r.value).is_some());
            assert!(r.agent.is_some());
        }
    }

    #[test]
    fn simulation_rejects_mismatched_policy() {
        let env_cfg = EnvConfig::by_name("cournot_duopoly").unwrap();
        let mut env = env_cfg.build().unwrap();
        let types = [Supertype::new(1.0, 0.5, PriorSpec::Uniform).unwrap()];
        let mut rng = stream(2, &[]);
        let policy = Policy::init(5, 3, &mut rng).unwrap();
        let err = simulate_records(&policy, &mut env, &types, false, 5, 1).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn trace_rows_carry_lambda_and_price() {
        let env_cfg = EnvConfig::by_name("cobweb").unwrap();
        let mut env = env_cfg.build().unwrap();
        let types = [Supertype::new(1.0, 0.25, PriorSpec::Uniform).unwrap()];
        let mut rng = stream(6, &[]);
        let space = env_cfg.action_space().unwrap();
        let policy = Policy::init(
            observation_len(env.env_feature_len(), space.len()),
            space.len(),
            &mut rng,
        )
        .unwrap();
        let rows = simulate_trace(&policy, &mut env, &types, 2, 3).unwrap();
        assert_eq!(rows.len(), 2 * env.horizon() * env.num_agents());
        for pair in rows.chunks(env.num_agents()) {
            // all agents in a step see the same realized price
            let p = pair[0].price.expect("market environment has a price");
            assert!(pair.iter().all(|r| r.price == Some(p)));
        }
        // lambda is drawn once per episode per agent, stable across steps
        let first_agent: Vec<&TraceRow> =
            rows.iter().filter(|r| r.episode == 0 && r.agent == 0).collect();
        assert!(first_agent.windows(2).all(|w| w[0].lambda == w[1].lambda));
        assert!(rows.iter().all(|r| r.utility.is_finite()));
        // price rows collapse to one record per step
        let mut env = env_cfg.build().unwrap();
        let records = simulate_records(&policy, &mut env, &types, true, 2, 3).unwrap();
        assert_eq!(records.len(), 2 * env.horizon());
        assert!(records.iter().all(|r| r.agent.is_none()));
    }

    #[test]
    fn records_pack_into_a_dataset() {
        let records = vec![
            SimRecord { episode: 0, step: 0, agent: Some(1), value: 20.0 },
            SimRecord { episode: 3, step: 2, agent: None, value: 5.9 },
        ];
        let ds = records_to_dataset("cobweb", &records).unwrap();
        assert_eq!(ds.observations()[0].subject, "e0a1");
        assert_eq!(ds.observations()[1].subject, "e3");
        assert_eq!(ds.observations()[1].round, 2);
    }
}
