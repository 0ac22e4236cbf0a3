//! Closed-form benchmarks for the three economic environments.

use bounded_agents::envs::{
    cournot_step, supply_chain_step, CobwebConfig, CournotConfig, SupplyChainConfig,
};
use bounded_agents::equilibrium::{cobweb_rational_price, cournot_nash, supply_chain_nash};

fn main() {
    let chain = SupplyChainConfig::default();
    let request = supply_chain_nash(&chain).unwrap();
    let (allocations, utilities) = supply_chain_step(&chain, &[request, request]).unwrap();
    println!("supply chain: both retailers request {request}");
    println!("  allocations {allocations:?}, utilities {utilities:?}");

    for (label, cfg) in [
        ("cournot duopoly", CournotConfig::duopoly()),
        ("cournot triopoly", CournotConfig::triopoly()),
    ] {
        let q = cournot_nash(&cfg).unwrap();
        let profile = vec![q; cfg.firms];
        let (price, utilities) = cournot_step(&cfg, &profile).unwrap();
        println!("{label}: each firm produces {q}, price {price:.2}, profit {:.2}", utilities[0]);
    }

    let cobweb = CobwebConfig::default();
    let p_star = cobweb_rational_price(&cobweb).unwrap();
    let supplied = cobweb.supply(p_star) * cobweb.producers as f64;
    let demanded = cobweb.demand_intercept - cobweb.demand_slope * p_star;
    println!("cobweb: rational expectations price {p_star:.6}");
    println!("  supply {supplied:.6} meets demand {demanded:.6}");
}
