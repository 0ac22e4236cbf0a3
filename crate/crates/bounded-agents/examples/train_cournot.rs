//! Rational Cournot duopoly: trained quantities should find the Nash
//! equilibrium of 20 units per firm.

use bounded_agents::calibration::simulate_distribution;
use bounded_agents::checkpoint::Checkpoint;
use bounded_agents::core::{PriorSpec, Supertype};
use bounded_agents::envs::{CournotConfig, EnvConfig};
use bounded_agents::equilibrium::cournot_nash;
use bounded_agents::learner::{train, TrainingConfig};

fn main() {
    let env_cfg = EnvConfig::by_name("cournot_duopoly").unwrap();
    let supertype = Supertype::new(0.0, 0.0, PriorSpec::Uniform).unwrap();

    let mut env = env_cfg.build().unwrap();
    let config = TrainingConfig { seed: 61, ..TrainingConfig::desk() };
    let out = train(&mut env, std::slice::from_ref(&supertype), &config).unwrap();
    for note in env.diagnostics() {
        println!("note: {note}");
    }

    let ckpt = Checkpoint::from_training(env_cfg.clone(), vec![supertype], 61, &out);
    let masses = simulate_distribution(&ckpt, 500, 62).unwrap();
    let space = env_cfg.action_space().unwrap();

    println!("decision distribution after training (500 episodes):");
    for (i, mass) in masses.iter().enumerate() {
        if *mass > 0.005 {
            let bar = "#".repeat((mass * 120.0).round() as usize);
            println!("  q={:>2}  {:>6.3}  {bar}", space.value(i), mass);
        }
    }
    println!("nash benchmark: {}", cournot_nash(&CournotConfig::duopoly()).unwrap());
}
