//! Calibrates supertype parameters against decision data.
//!
//! Generates a synthetic dataset from a known population, then runs the
//! grid search: five random half/half splits of the data, every (mu,
//! sigma*) cell trained and simulated, the winner picked by training MSE
//! and scored by held-out RMSE. A small grid and budget keep this example
//! to a few minutes; the defaults in `Grid::default` span the full range.

use bounded_agents::calibration::{
    records_to_dataset, run_calibration, simulate_records, CalibrationBudget,
    CalibrationConfig, Grid,
};
use bounded_agents::core::{PriorSpec, Supertype};
use bounded_agents::envs::EnvConfig;
use bounded_agents::learner::{train, TrainingConfig};

fn main() {
    let env_cfg = EnvConfig::by_name("cournot_duopoly").unwrap();
    let budget = TrainingConfig {
        iterations: 60,
        episodes_per_iteration: 64,
        ..TrainingConfig::reference()
    };

    // ground truth: a moderately bounded, heterogeneous population
    let truth = Supertype::new(1.0, 0.25, PriorSpec::Uniform).unwrap();
    let mut env = env_cfg.build().unwrap();
    let gen_cfg = TrainingConfig { seed: 900, ..budget.clone() };
    let out = train(&mut env, std::slice::from_ref(&truth), &gen_cfg).unwrap();
    let mut env = env_cfg.build().unwrap();
    let records = simulate_records(&out.policy, &mut env, &[truth], false, 600, 901).unwrap();
    let dataset = records_to_dataset("cournot_duopoly", &records).unwrap();
    println!("synthetic dataset: {} decisions from (mu 1, sigma* 0.25)", dataset.len());

    let config = CalibrationConfig {
        env: env_cfg,
        grid: Grid { mu_values: vec![0.0, 1.0, 2.5], sigma_star_values: vec![0.0, 0.25] },
        budget: CalibrationBudget { training: budget, sim_episodes: 600 },
        prior: PriorSpec::Uniform,
        seed: 42,
    };
    let report = run_calibration(&dataset, &config).unwrap();

    println!();
    println!("selected cell per repetition and fold direction:");
    for sel in &report.selected {
        println!(
            "  repetition {} fold {}: mu {:<4} sigma* {:<5} train MSE {:.5}, test RMSE {:.5}",
            sel.repetition, sel.direction, sel.mu, sel.sigma_star, sel.train_mse, sel.test_rmse
        );
    }
    let summary = report.rmse_summary();
    println!();
    println!("held-out RMSE {:.5} +- {:.5}", summary.mean, summary.std);
}
