//! Trains a single agent on a two-armed bandit and compares the learned
//! policy with the quantal response fixed point it should converge to.
//!
//! With a uniform prior and processing cost lambda, the regularized
//! optimum is the Gibbs policy over arm utilities. The learner only ever
//! sees sampled rewards, so matching the fixed point is a real test.

use bounded_agents::core::{total_variation, PriorSpec, Supertype};
use bounded_agents::envs::{MatrixGame, MatrixGameEnv};
use bounded_agents::equilibrium::logit_qre;
use bounded_agents::learner::{train, TrainingConfig};
use bounded_agents::policy::encode_observation;

fn main() {
    let payoffs = vec![1.0, 0.0];
    let lambda = 1.0;

    let game = MatrixGame::bandit(payoffs.clone()).unwrap();
    let target = logit_qre(&game, lambda, 1e-10, 10_000).unwrap().strategies[0].clone();

    let mut env = MatrixGameEnv::all_learning(game).unwrap();
    let supertype = Supertype::new(lambda, 0.0, PriorSpec::Uniform).unwrap();
    let config = TrainingConfig { seed: 5, ..TrainingConfig::desk() };
    let out = train(&mut env, std::slice::from_ref(&supertype), &config).unwrap();

    for point in out.curve.iter().step_by(30) {
        println!(
            "iteration {:>4}: utility {:.4}, divergence {:.4}, regularized {:.4}",
            point.iteration,
            point.mean_raw_utility,
            point.mean_kl_penalty,
            point.mean_regularized_reward
        );
    }

    let obs = encode_observation(&[], 0, 1, lambda, &out.priors[0]);
    let learned = out.policy.forward(&obs).unwrap().probs().to_vec();
    println!();
    println!("learned  ({:.4}, {:.4})", learned[0], learned[1]);
    println!("fixed pt ({:.4}, {:.4})", target[0], target[1]);
    println!("total variation {:.4}", total_variation(&learned, &target));
}
