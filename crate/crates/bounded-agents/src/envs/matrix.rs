//! Normal-form matrix games.
//!
//! A payoff tensor over joint action profiles, used both as a tiny training
//! environment and as the input to the equilibrium solvers. Profiles are
//! flattened row-major with player 0 varying slowest.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::ActionSpace;
use crate::envs::{check_joint_action, Environment, StepOutcome};
use crate::error::{Error, Result};
use crate::policy::ActionDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    /// Actions available to each player.
    actions: Vec<usize>,
    /// One flattened payoff table per player.
    payoffs: Vec<Vec<f64>>,
}

impl MatrixGame {
    pub fn new(actions: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if actions.is_empty() || actions.iter().any(|&n| n == 0) {
            return Err(Error::Config(format!("bad action counts {actions:?}")));
        }
        let profiles: usize = actions.iter().product();
        if payoffs.len() != actions.len() {
            return Err(Error::Dimension(format!(
                "{} payoff tables for {} players",
                payoffs.len(),
                actions.len()
            )));
        }
        for (i, table) in payoffs.iter().enumerate() {
            if table.len() != profiles {
                return Err(Error::Dimension(format!(
                    "player {i} payoff table has {} entries, expected {profiles}",
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("payoff {bad} for player {i}")));
            }
        }
        Ok(MatrixGame { actions, payoffs })
    }

    /// One player choosing among the given payoffs; no opponents.
    pub fn bandit(payoffs: Vec<f64>) -> Result<Self> {
        let n = payoffs.len();
        MatrixGame::new(vec![n], vec![payoffs])
    }

    /// Rock-paper-scissors: win 1, lose -1, tie 0.
    pub fn rock_paper_scissors() -> Self {
        let mut u0 = vec![0.0; 9];
        for a in 0..3usize {
            for b in 0..3usize {
                // rock(0) beats scissors(2), paper(1) beats rock, scissors
                // beat paper: a wins exactly when a == (b + 1) mod 3
                u0[a * 3 + b] = if a == b {
                    0.0
                } else if (b + 1) % 3 == a {
                    1.0
                } else {
                    -1.0
                };
            }
        }
        let u1 = u0.iter().map(|v| -v).collect();
        MatrixGame::new(vec![3, 3], vec![u0, u1]).expect("static game")
    }

    /// Matching pennies: the matcher wins 1 on equal coins, loses 1 otherwise.
    pub fn matching_pennies() -> Self {
        let u0 = vec![1.0, -1.0, -1.0, 1.0];
        let u1 = u0.iter().map(|v| -v).collect();
        MatrixGame::new(vec![2, 2], vec![u0, u1]).expect("static game")
    }

    /// Two-action game where action 0 strictly dominates for both players.
    pub fn dominant_action(gap: f64) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(Error::Config(format!("dominance gap must be positive, got {gap}")));
        }
        let u0 = vec![gap, gap, 0.0, 0.0];
        let u1 = vec![gap, 0.0, gap, 0.0];
        MatrixGame::new(vec![2, 2], vec![u0, u1])
    }

    pub fn num_players(&self) -> usize {
        self.actions.len()
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.actions[player]
    }

    fn flat_index(&self, profile: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &a) in profile.iter().enumerate() {
            idx = idx * self.actions[p] + a;
        }
        idx
    }

    /// Payoffs for every player at a pure joint action.
    pub fn step(&self, profile: &[usize]) -> Result<Vec<f64>> {
        if profile.len() != self.num_players() {
            return Err(Error::Dimension(format!(
                "profile of {} actions for {} players",
                profile.len(),
                self.num_players()
            )));
        }
        for (p, &a) in profile.iter().enumerate() {
            if a >= self.actions[p] {
                return Err(Error::Dimension(format!(
                    "action {a} out of range for player {p} with {} actions",
                    self.actions[p]
                )));
            }
        }
        let idx = self.flat_index(profile);
        Ok(self.payoffs.iter().map(|table| table[idx]).collect())
    }

    /// Expected payoff to `player` for each of its actions when everyone
    /// else plays the given mixed strategies (`mixes[player]` is ignored).
    pub fn expected_payoffs(&self, player: usize, mixes: &[Vec<f64>]) -> Result<Vec<f64>> {
        if mixes.len() != self.num_players() {
            return Err(Error::Dimension(format!(
                "{} strategies for {} players",
                mixes.len(),
                self.num_players()
            )));
        }
        for (p, m) in mixes.iter().enumerate() {
            if p != player && m.len() != self.actions[p] {
                return Err(Error::Dimension(format!(
                    "player {p} strategy has {} entries, expected {}",
                    m.len(),
                    self.actions[p]
                )));
            }
        }
        let mut out = vec![0.0; self.actions[player]];
        let mut profile = vec![0usize; self.num_players()];
        for (a, slot) in out.iter_mut().enumerate() {
            *slot = self.expected_recursive(player, a, mixes, &mut profile, 0, 1.0);
        }
        Ok(out)
    }

    fn expected_recursive(
        &self,
        player: usize,
        action: usize,
        mixes: &[Vec<f64>],
        profile: &mut Vec<usize>,
        depth: usize,
        weight: f64,
    ) -> f64 {
        if depth == self.num_players() {
            return weight * self.payoffs[player][self.flat_index(profile)];
        }
        if depth == player {
            profile[depth] = action;
            return self.expected_recursive(player, action, mixes, profile, depth + 1, weight);
        }
        let mut acc = 0.0;
        for a in 0..self.actions[depth] {
            let w = weight * mixes[depth][a];
            if w == 0.0 {
                continue;
            }
            profile[depth] = a;
            acc += self.expected_recursive(player, action, mixes, profile, depth + 1, w);
        }
        acc
    }
}

/// A matrix game as a training environment. Players with a fixed mixed
/// strategy are sampled by the environment; the remaining players are the
/// learning agents, in player order. All players must share an action count
/// so the learners can share one policy head.
pub struct MatrixGameEnv {
    game: MatrixGame,
    fixed: Vec<Option<Vec<f64>>>,
    learners: Vec<usize>,
    space: ActionSpace,
}

impl MatrixGameEnv {
    /// `fixed[p]` is `Some(mix)` for scripted players, `None` for learners.
    pub fn new(game: MatrixGame, fixed: Vec<Option<Vec<f64>>>) -> Result<Self> {
        if fixed.len() != game.num_players() {
            return Err(Error::Dimension(format!(
                "{} strategy slots for {} players",
                fixed.len(),
                game.num_players()
            )));
        }
        let n0 = game.num_actions(0);
        if (1..game.num_players()).any(|p| game.num_actions(p) != n0) {
            return Err(Error::Config(
                "all players must share an action count to train a shared policy".into(),
            ));
        }
        let learners: Vec<usize> =
            (0..game.num_players()).filter(|&p| fixed[p].is_none()).collect();
        if learners.is_empty() {
            return Err(Error::Config("at least one player must be learning".into()));
        }
        for (p, mix) in fixed.iter().enumerate() {
            if let Some(m) = mix {
                crate::core::PriorBelief::new(m.clone()).map_err(|e| {
                    Error::Config(format!("fixed strategy for player {p} is invalid: {e}"))
                })?;
            }
        }
        // actions are abstract indices; give them the 0..n-1 integer grid
        let space = ActionSpace::integers(0, n0 as i64 - 1)?;
        Ok(MatrixGameEnv { game, fixed, learners, space })
    }

    /// All players learning.
    pub fn all_learning(game: MatrixGame) -> Result<Self> {
        let fixed = vec![None; game.num_players()];
        MatrixGameEnv::new(game, fixed)
    }

    pub fn game(&self) -> &MatrixGame {
        &self.game
    }
}

impl Environment for MatrixGameEnv {
    fn num_agents(&self) -> usize {
        self.learners.len()
    }

    fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    fn horizon(&self) -> usize {
        1
    }

    fn reset(&mut self) {}

    fn step(&mut self, actions: &[usize], rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        check_joint_action(actions, self.learners.len(), self.space.len())?;
        let mut profile = vec![0usize; self.game.num_players()];
        let mut next_learner = 0;
        for p in 0..self.game.num_players() {
            profile[p] = match &self.fixed[p] {
                Some(mix) => {
                    let dist = ActionDistribution::from_probs(mix)?;
                    dist.sample(rng)
                }
                None => {
                    let a = actions[next_learner];
                    next_learner += 1;
                    a
                }
            };
        }
        let all = self.game.step(&profile)?;
        let utilities = self.learners.iter().map(|&p| all[p]).collect();
        Ok(StepOutcome { utilities, price: None, done: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn rps_payoffs() {
        let g = MatrixGame::rock_paper_scissors();
        // rock beats scissors
        assert_eq!(g.step(&[0, 2]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(g.step(&[0, 0]).unwrap(), vec![0.0, 0.0]);
        // paper beats rock, scissors beat paper
        assert_eq!(g.step(&[1, 0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(g.step(&[1, 2]).unwrap(), vec![-1.0, 1.0]);
        // zero sum everywhere
        for a in 0..3 {
            for b in 0..3 {
                let u = g.step(&[a, b]).unwrap();
                assert_eq!(u[0] + u[1], 0.0);
            }
        }
    }

    #[test]
    fn matching_pennies_payoffs() {
        let g = MatrixGame::matching_pennies();
        assert_eq!(g.step(&[0, 0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(g.step(&[1, 1]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(g.step(&[0, 1]).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn expected_payoffs_against_uniform_rps() {
        let g = MatrixGame::rock_paper_scissors();
        let mixes = vec![vec![], vec![1.0 / 3.0; 3]];
        let e = g.expected_payoffs(0, &mixes).unwrap();
        for v in e {
            assert!(v.abs() < 1e-15);
        }
        // against pure scissors, rock earns 1
        let mixes = vec![vec![], vec![0.0, 0.0, 1.0]];
        let e = g.expected_payoffs(0, &mixes).unwrap();
        assert_eq!(e, vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn bandit_expected_payoffs_are_the_table() {
        let g = MatrixGame::bandit(vec![1.0, 0.0]).unwrap();
        let e = g.expected_payoffs(0, &[vec![]]).unwrap();
        assert_eq!(e, vec![1.0, 0.0]);
    }

    #[test]
    fn dominant_action_game_dominates() {
        let g = MatrixGame::dominant_action(1.0).unwrap();
        for b in 0..2 {
            let u_top = g.step(&[0, b]).unwrap()[0];
            let u_bot = g.step(&[1, b]).unwrap()[0];
            assert!(u_top > u_bot);
        }
    }

    #[test]
    fn env_fills_in_scripted_players() {
        let g = MatrixGame::rock_paper_scissors();
        // player 1 always plays scissors; learner is player 0
        let mut env = MatrixGameEnv::new(g, vec![None, Some(vec![0.0, 0.0, 1.0])]).unwrap();
        let mut rng = stream(4, &[]);
        assert_eq!(env.num_agents(), 1);
        let out = env.step(&[0], &mut rng).unwrap();
        assert_eq!(out.utilities, vec![1.0]);
        let out = env.step(&[2], &mut rng).unwrap();
        assert_eq!(out.utilities, vec![0.0]);
    }

    #[test]
    fn invalid_games_rejected() {
        assert!(MatrixGame::new(vec![2, 2], vec![vec![0.0; 4]]).is_err());
        assert!(MatrixGame::new(vec![2, 2], vec![vec![0.0; 3], vec![0.0; 4]]).is_err());
        assert!(MatrixGame::new(vec![2, 0], vec![vec![], vec![]]).is_err());
        assert!(MatrixGame::new(vec![2], vec![vec![f64::NAN, 0.0]]).is_err());
        let g = MatrixGame::matching_pennies();
        assert!(MatrixGameEnv::new(g.clone(), vec![None]).is_err());
        assert!(MatrixGameEnv::new(g.clone(), vec![Some(vec![0.5, 0.5]), Some(vec![0.5, 0.5])])
            .is_err());
        assert!(MatrixGameEnv::new(g, vec![None, Some(vec![0.7, 0.7])]).is_err());
    }
}
