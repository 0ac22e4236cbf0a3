//! Ranks competing models from their per-environment RMSE summaries.
//!
//! Each environment column is ranked separately (ties share the average
//! position) and the per-model average is weighted, here halving the two
//! oligopoly columns since they measure nearly the same thing.

use bounded_agents::calibration::{rank_models, RmseCell, RmseTable};

fn main() {
    let table = RmseTable::new(
        vec!["rational".into(), "standard_marl".into(), "bounded_agents".into()],
        vec![
            "supply_chain".into(),
            "cournot_duopoly".into(),
            "cournot_triopoly".into(),
            "cobweb".into(),
        ],
        vec![
            vec![
                RmseCell { mean: 0.33, std: 0.004 },
                RmseCell { mean: 0.16, std: 0.001 },
                RmseCell { mean: 0.16, std: 0.002 },
                RmseCell { mean: 0.02, std: 0.0005 },
            ],
            vec![
                RmseCell { mean: 0.33, std: 0.004 },
                RmseCell { mean: 0.13, std: 0.001 },
                RmseCell { mean: 0.15, std: 0.002 },
                RmseCell { mean: 0.03, std: 0.0005 },
            ],
            vec![
                RmseCell { mean: 0.02, std: 0.005 },
                RmseCell { mean: 0.04, std: 0.001 },
                RmseCell { mean: 0.03, std: 0.001 },
                RmseCell { mean: 0.01, std: 0.0005 },
            ],
        ],
    )
    .unwrap();

    let ranked = rank_models(&table, &[1.0, 0.5, 0.5, 1.0]).unwrap();
    print!("{}", ranked.render_text());
    println!();
    println!("note the supply chain tie: both baselines collapse to the same prediction");
}
