//! Excess price volatility in the cobweb market.
//!
//! Producers forecast the next price; supply commits to the forecasts and
//! the realized price clears demand with a small shock. Rational-forecast
//! populations fluctuate only by the shock. A population paying a high
//! enough information cost keeps dispersed forecasts, and that dispersion
//! feeds back into realized prices as extra volatility.
//!
//! Trains two populations, so expect a few minutes of compute.

use bounded_agents::calibration::simulate_trace;
use bounded_agents::core::{PriorSpec, Supertype};
use bounded_agents::envs::{CobwebConfig, EnvConfig};
use bounded_agents::equilibrium::cobweb_rational_price;
use bounded_agents::learner::{train, TrainingConfig};

fn price_std(prices: &[f64]) -> f64 {
    let mean = prices.iter().sum::<f64>() / prices.len() as f64;
    let var = prices.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / prices.len() as f64;
    var.sqrt()
}

fn population_prices(mu: f64, sigma_star: f64) -> Vec<f64> {
    let env_cfg = EnvConfig::by_name("cobweb").unwrap();
    let supertype = Supertype::new(mu, sigma_star, PriorSpec::Uniform).unwrap();
    let mut env = env_cfg.build().unwrap();
    let config = TrainingConfig {
        episodes_per_iteration: 8,
        seed: 71,
        ..TrainingConfig::desk()
    };
    let out = train(&mut env, std::slice::from_ref(&supertype), &config).unwrap();
    let mut env = env_cfg.build().unwrap();
    let trace = simulate_trace(&out.policy, &mut env, &[supertype], 200, 9).unwrap();
    trace
        .iter()
        .filter(|row| row.agent == 0)
        .map(|row| row.price.unwrap())
        .collect()
}

fn main() {
    let cfg = CobwebConfig::default();
    let p_star = cobweb_rational_price(&cfg).unwrap();
    println!("rational expectations price {p_star:.4}, shock std {}", cfg.shock_std);
    println!();

    let rational = population_prices(0.0, 0.0);
    println!("mu 0:               price std {:.4}", price_std(&rational));

    let bounded = population_prices(2.5, 0.25);
    let ratio = price_std(&bounded) / price_std(&rational);
    println!("mu 2.5, sigma* 0.25: price std {:.4} ({ratio:.2}x)", price_std(&bounded));
}
