//! Quantal response equilibria of small matrix games.
//!
//! Each player's mixed strategy is a softmax of expected payoffs at
//! temperature lambda, solved to a fixed point by damped iteration.

use bounded_agents::envs::MatrixGame;
use bounded_agents::equilibrium::logit_qre;

fn show(label: &str, game: &MatrixGame, lambdas: &[f64]) {
    println!("{label}");
    for &lambda in lambdas {
        let sol = logit_qre(game, lambda, 1e-10, 100_000).unwrap();
        let mixes: Vec<String> = sol
            .strategies
            .iter()
            .map(|mix| {
                let cells: Vec<String> = mix.iter().map(|p| format!("{p:.4}")).collect();
                format!("({})", cells.join(", "))
            })
            .collect();
        println!(
            "  lambda {lambda:>6}: {} [{} iterations]",
            mixes.join(" vs "),
            sol.iterations
        );
    }
    println!();
}

fn main() {
    show(
        "rock paper scissors: thirds at every temperature",
        &MatrixGame::rock_paper_scissors(),
        &[5.0, 1.0, 0.1],
    );
    show(
        "matching pennies: mixing survives even near rationality",
        &MatrixGame::matching_pennies(),
        &[1.0, 0.1, 0.01],
    );
    // payoff gap of 1 for the first action regardless of the opponent
    show(
        "dominant action game: low temperature concentrates on the dominant arm",
        &MatrixGame::dominant_action(1.0).unwrap(),
        &[5.0, 1.0, 0.01],
    );
    let bandit = MatrixGame::bandit(vec![1.0, 0.0]).unwrap();
    let sol = logit_qre(&bandit, 1.0, 1e-10, 10_000).unwrap();
    let e = std::f64::consts::E;
    println!(
        "two-action bandit at lambda 1: ({:.6}, {:.6}), closed form (e/(e+1), 1/(e+1)) = ({:.6}, {:.6})",
        sol.strategies[0][0],
        sol.strategies[0][1],
        e / (e + 1.0),
        1.0 / (e + 1.0)
    );
}
