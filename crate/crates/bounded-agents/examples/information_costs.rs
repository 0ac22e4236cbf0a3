//! How the information cost shapes a decision.
//!
//! An agent weighing utilities U against a prior q pays lambda times the
//! KL divergence between its policy and the prior. The best trade-off is
//! the Gibbs policy pi(a) proportional to q(a) * exp(U(a) / lambda). This
//! example prints that policy across lambda values for a three-action
//! choice, showing the slide from utility maximization to prior-following.

use bounded_agents::core::{kl_divergence, regularized_reward, PriorBelief};

fn gibbs(utilities: &[f64], prior: &PriorBelief, lambda: f64) -> Vec<f64> {
    let weights: Vec<f64> = utilities
        .iter()
        .zip(prior.probs())
        .map(|(&u, &q)| q * (u / lambda).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

fn main() {
    let utilities = [3.0, 2.0, 0.0];
    // the prior leans toward the worst action, as a habit might
    let prior = PriorBelief::new(vec![0.2, 0.2, 0.6]).unwrap();

    println!("utilities {utilities:?}, prior {:?}", prior.probs());
    println!();
    println!("{:>8}  {:>22}  {:>10}  {:>12}", "lambda", "policy", "KL", "reg. value");
    for lambda in [0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let pi = gibbs(&utilities, &prior, lambda);
        let kl = kl_divergence(&pi, &prior).unwrap();
        let expected_utility: f64 =
            pi.iter().zip(&utilities).map(|(p, u)| p * u).sum();
        let value = regularized_reward(expected_utility, lambda, kl);
        let cells: Vec<String> = pi.iter().map(|p| format!("{p:.3}")).collect();
        println!(
            "{lambda:>8}  [{}]  {kl:>10.4}  {value:>12.4}",
            cells.join(", ")
        );
    }
    println!();
    println!("small lambda recovers the argmax, large lambda reproduces the prior");
}
