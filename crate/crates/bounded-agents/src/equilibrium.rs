//! Benchmark solutions: logit quantal response, best response, Nash
//! quantities, and the cobweb market's rational-expectations price.
//!
//! These are the yardsticks the learned policies are compared against. The
//! QRE solver finds the fixed point where every player's mixed strategy is a
//! softmax (temperature `lambda`) of its expected payoffs against the others;
//! as `lambda` shrinks it approaches Nash play, and as it grows the
//! strategies flatten toward uniform.

use crate::envs::{CobwebConfig, CournotConfig, MatrixGame, SupplyChainConfig};
use crate::error::{Error, Result};

/// Damping of the fixed-point iteration; full steps can cycle at small
/// temperatures.
const QRE_DAMPING: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct QreSolution {
    /// One mixed strategy per player.
    pub strategies: Vec<Vec<f64>>,
    /// The temperature the solution was computed at.
    pub lambda: f64,
    /// Iterations used.
    pub iterations: usize,
    /// Max-norm displacement of the final quantal-response map application.
    pub residual: f64,
}

/// Applies the quantal-response map once: each player's new strategy is the
/// softmax of its expected payoffs (divided by `lambda`) against everyone
/// else's current strategy. Returns the mapped strategies and the max-norm
/// displacement from the input.
fn qre_map(game: &MatrixGame, strategies: &[Vec<f64>], lambda: f64) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut mapped = Vec::with_capacity(strategies.len());
    let mut displacement = 0.0f64;
    for player in 0..game.num_players() {
        let payoffs = game.expected_payoffs(player, strategies)?;
        let m = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = payoffs.iter().map(|&u| ((u - m) / lambda).exp()).collect();
        let z: f64 = exps.iter().sum();
        let next: Vec<f64> = exps.iter().map(|e| e / z).collect();
        for (new, old) in next.iter().zip(&strategies[player]) {
            displacement = displacement.max((new - old).abs());
        }
        mapped.push(next);
    }
    Ok((mapped, displacement))
}

/// Damped fixed-point iteration of the quantal-response map from uniform
/// starting strategies. `lambda` must be positive; the rational limit is
/// served exactly by [`best_response`] instead.
pub fn logit_qre(game: &MatrixGame, lambda: f64, tol: f64, max_iter: usize) -> Result<QreSolution> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Config(format!(
            "quantal response needs lambda > 0, got {lambda}; use best_response for the rational limit"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut strategies: Vec<Vec<f64>> = (0..game.num_players())
        .map(|p| vec![1.0 / game.num_actions(p) as f64; game.num_actions(p)])
        .collect();
    for it in 1..=max_iter {
        let (mapped, displacement) = qre_map(game, &strategies, lambda)?;
        if displacement < tol {
            return Ok(QreSolution { strategies: mapped, lambda, iterations: it, residual: displacement });
        }
        for (s, m) in strategies.iter_mut().zip(mapped) {
            for (si, mi) in s.iter_mut().zip(m) {
                *si = (1.0 - QRE_DAMPING) * *si + QRE_DAMPING * mi;
            }
        }
    }
    let (_, residual) = qre_map(game, &strategies, lambda)?;
    Err(Error::Convergence {
        residual,
        message: format!("quantal response at lambda {lambda} after {max_iter} iterations"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    /// Maximizing action, lowest index on ties.
    pub action: usize,
    /// All actions within tolerance of the maximum expected payoff.
    pub ties: Vec<usize>,
    /// Expected payoff per action.
    pub expected: Vec<f64>,
}

/// Exact best response for `player` against the others' mixed strategies
/// (`mixes[player]` is ignored). Ties within 1e-12 of the maximum are
/// reported rather than swallowed.
pub fn best_response(game: &MatrixGame, player: usize, mixes: &[Vec<f64>]) -> Result<BestResponse> {
    if player >= game.num_players() {
        return Err(Error::Dimension(format!(
            "player {player} out of range for {} players",
            game.num_players()
        )));
    }
    for (p, m) in mixes.iter().enumerate() {
        if p != player {
            crate::core::PriorBelief::new(m.clone()).map_err(|e| {
                Error::Distribution(format!("strategy for player {p}: {e}"))
            })?;
        }
    }
    let expected = game.expected_payoffs(player, mixes)?;
    let best = expected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = expected
        .iter()
        .enumerate()
        .filter(|(_, &u)| (best - u) <= 1e-12 * best.abs().max(1.0))
        .map(|(a, _)| a)
        .collect();
    Ok(BestResponse { action: ties[0], ties, expected })
}

/// Symmetric Nash quantity for the linear Cournot game. Iterates the exact
/// grid best response from the middle of the grid, averaging each iterate
/// with its response: the raw response map has slope -(n-1)/2 in the
/// symmetric quantity and oscillates outright for three firms, while the
/// averaged map contracts. Terminates at a true response fixed point; failure
/// to fix within the iteration budget (a cycle of the averaged map) is an
/// error.
pub fn cournot_nash(cfg: &CournotConfig) -> Result<f64> {
    cfg.validate()?;
    let space = cfg.action_space()?;
    let others = cfg.firms - 1;
    // best quantity on the grid when all opponents produce q_other
    let br = |q_other: f64| -> usize {
        let mut best_a = 0;
        let mut best_u = f64::NEG_INFINITY;
        for (a, q) in space.values().enumerate() {
            let total = q + others as f64 * q_other;
            let u = (cfg.intercept - cfg.slope * total).max(0.0) * q;
            if u > best_u {
                best_u = u;
                best_a = a;
            }
        }
        best_a
    };
    let mut a = space.len() / 2;
    let mut last_gap = 0.0;
    for _ in 0..4 * space.len() {
        let response = br(space.value(a));
        if response == a {
            return Ok(space.value(a));
        }
        last_gap = (space.value(response) - space.value(a)).abs();
        a = space.nearest_index(0.5 * (space.value(a) + space.value(response)));
    }
    Err(Error::Convergence {
        residual: last_gap,
        message: "best-response iteration cycles; no symmetric grid equilibrium found".into(),
    })
}

/// Nash order in the capacity-constrained allocation game: everyone requests
/// the maximum. Requires capacity to actually bind; with slack capacity the
/// game is not the one this solves.
pub fn supply_chain_nash(cfg: &SupplyChainConfig) -> Result<f64> {
    cfg.validate()?;
    if !cfg.capacity_binds() {
        return Err(Error::Config(format!(
            "capacity {} covers total demand {}; the all-maximum equilibrium needs binding capacity",
            cfg.capacity,
            cfg.retailers as f64 * cfg.demand
        )));
    }
    Ok(cfg.max_order as f64)
}

/// Shock-free market-clearing price of the cobweb economy: the `p` where
/// linear demand equals the total tanh supply of producers who all forecast
/// `p`. Bisection to 1e-10 over the forecast grid range.
pub fn cobweb_rational_price(cfg: &CobwebConfig) -> Result<f64> {
    // demand minus supply, strictly decreasing in p
    let gap = |p: f64| {
        cfg.demand_intercept - cfg.demand_slope * p - cfg.producers as f64 * cfg.supply(p)
    };
    let (mut lo, mut hi) = (cfg.price_lo, cfg.price_hi);
    let (g_lo, g_hi) = (gap(lo), gap(hi));
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Convergence {
            residual: g_lo.abs().min(g_hi.abs()),
            message: format!(
                "no market-clearing price in [{lo}, {hi}]: demand-supply gap keeps one sign"
            ),
        });
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if gap(mid).signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
