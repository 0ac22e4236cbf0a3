//! Game environments.
//!
//! All four environments share one trait: agents pick indices into a discrete
//! action grid, the environment maps the joint action to per-agent utilities,
//! and market environments also report a realized price. Three are one-shot
//! games replayed every episode (supply chain, Cournot); the cobweb market
//! runs for a horizon of many steps with the previous price as state.

mod cobweb;
mod cournot;
mod matrix;
mod supply_chain;

pub use cobweb::{cobweb_step, CobwebConfig, CobwebEnv};
pub use cournot::{cournot_step, CournotConfig, CournotEnv};
pub use matrix::{MatrixGame, MatrixGameEnv};
pub use supply_chain::{supply_chain_step, SupplyChainConfig, SupplyChainEnv};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::ActionSpace;
use crate::error::{Error, Result};

/// Joint outcome of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// One raw utility per agent, in agent order.
    pub utilities: Vec<f64>,
    /// Realized market price, when the environment has one.
    pub price: Option<f64>,
    /// True when the episode is over.
    pub done: bool,
}

pub trait Environment {
    fn num_agents(&self) -> usize;

    fn action_space(&self) -> &ActionSpace;

    /// Steps per episode.
    fn horizon(&self) -> usize;

    /// Width of the per-agent feature slice of the observation.
    fn env_feature_len(&self) -> usize {
        0
    }

    /// Features visible to one agent in the current state, normalized to
    /// stay within roughly [0, 1].
    fn env_features(&self, _agent: usize) -> Vec<f64> {
        Vec::new()
    }

    /// Begin a new episode.
    fn reset(&mut self);

    /// Advance one step. `actions[i]` is agent i's index into the action
    /// grid; the RNG drives any environment noise.
    fn step(&mut self, actions: &[usize], rng: &mut ChaCha8Rng) -> Result<StepOutcome>;

    /// One-line notes accumulated since the last reset of counters
    /// (for example how often a price floor was hit). Empty by default.
    fn diagnostics(&self) -> Vec<String> {
        Vec::new()
    }
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn num_agents(&self) -> usize {
        (**self).num_agents()
    }

    fn action_space(&self) -> &ActionSpace {
        (**self).action_space()
    }

    fn horizon(&self) -> usize {
        (**self).horizon()
    }

    fn env_feature_len(&self) -> usize {
        (**self).env_feature_len()
    }

    fn env_features(&self, agent: usize) -> Vec<f64> {
        (**self).env_features(agent)
    }

    fn reset(&mut self) {
        (**self).reset()
    }

    fn step(&mut self, actions: &[usize], rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        (**self).step(actions, rng)
    }

    fn diagnostics(&self) -> Vec<String> {
        (**self).diagnostics()
    }
}

fn check_joint_action(actions: &[usize], n_agents: usize, n_actions: usize) -> Result<()> {
    if actions.len() != n_agents {
        return Err(Error::Dimension(format!(
            "joint action has {} entries for {} agents",
            actions.len(),
            n_agents
        )));
    }
    if let Some(&bad) = actions.iter().find(|&&a| a >= n_actions) {
        return Err(Error::Dimension(format!(
            "action index {bad} out of range for {n_actions} actions"
        )));
    }
    Ok(())
}

/// Configuration for any environment, tagged by kind. This is what configs
/// and checkpoints embed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvConfig {
    SupplyChain(SupplyChainConfig),
    CournotDuopoly(CournotConfig),
    CournotTriopoly(CournotConfig),
    Cobweb(CobwebConfig),
}

impl EnvConfig {
    /// Environment with default parameters for a kind name such as
    /// `cournot_duopoly`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "supply_chain" => Ok(EnvConfig::SupplyChain(SupplyChainConfig::default())),
            "cournot_duopoly" => Ok(EnvConfig::CournotDuopoly(CournotConfig::duopoly())),
            "cournot_triopoly" => Ok(EnvConfig::CournotTriopoly(CournotConfig::triopoly())),
            "cobweb" => Ok(EnvConfig::Cobweb(CobwebConfig::default())),
            other => Err(Error::Config(format!(
                "unknown environment `{other}` (expected supply_chain, cournot_duopoly, \
                 cournot_triopoly, or cobweb)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnvConfig::SupplyChain(_) => "supply_chain",
            EnvConfig::CournotDuopoly(_) => "cournot_duopoly",
            EnvConfig::CournotTriopoly(_) => "cournot_triopoly",
            EnvConfig::Cobweb(_) => "cobweb",
        }
    }

    pub fn build(&self) -> Result<Box<dyn Environment>> {
        match self {
            EnvConfig::SupplyChain(c) => Ok(Box::new(SupplyChainEnv::new(c.clone())?)),
            EnvConfig::CournotDuopoly(c) => {
                if c.firms != 2 {
                    return Err(Error::Config(format!(
                        "cournot_duopoly requires 2 firms, config says {}",
                        c.firms
                    )));
                }
                Ok(Box::new(CournotEnv::new(c.clone())?))
            }
            EnvConfig::CournotTriopoly(c) => {
                if c.firms != 3 {
                    return Err(Error::Config(format!(
                        "cournot_triopoly requires 3 firms, config says {}",
                        c.firms
                    )));
                }
                Ok(Box::new(CournotEnv::new(c.clone())?))
            }
            EnvConfig::Cobweb(c) => Ok(Box::new(CobwebEnv::new(c.clone())?)),
        }
    }

    /// The action grid this configuration implies, without building the
    /// environment.
    pub fn action_space(&self) -> Result<ActionSpace> {
        match self {
            EnvConfig::SupplyChain(c) => c.action_space(),
            EnvConfig::CournotDuopoly(c) | EnvConfig::CournotTriopoly(c) => c.action_space(),
            EnvConfig::Cobweb(c) => c.action_space(),
        }
    }

    /// How simulated decisions and empirical observations are binned for
    /// this environment: exact grid values for decisions, nearest grid point
    /// for continuous outcomes such as prices.
    pub fn records_prices(&self) -> bool {
        matches!(self, EnvConfig::Cobweb(_))
    }
}
