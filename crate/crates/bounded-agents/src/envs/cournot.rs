//! Cournot quantity competition.
//!
//! Firms simultaneously choose integer production quantities; the market
//! price follows a linear inverse demand curve `p = intercept - slope * Q`
//! floored at zero, and each firm earns price times its own quantity
//! (marginal cost is zero). Played as a one-shot game each episode.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::ActionSpace;
use crate::envs::{check_joint_action, Environment, StepOutcome};
use crate::error::{Error, Result};

fn default_intercept() -> f64 {
    2.4
}
fn default_slope() -> f64 {
    0.04
}
fn default_min_quantity() -> u32 {
    8
}
fn default_max_quantity() -> u32 {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CournotConfig {
    /// Number of competing firms.
    pub firms: usize,
    /// Inverse demand intercept.
    #[serde(default = "default_intercept")]
    pub intercept: f64,
    /// Inverse demand slope per unit of total quantity.
    #[serde(default = "default_slope")]
    pub slope: f64,
    /// Quantities are integers in `{min_quantity, ..., max_quantity}`.
    #[serde(default = "default_min_quantity")]
    pub min_quantity: u32,
    #[serde(default = "default_max_quantity")]
    pub max_quantity: u32,
}

impl CournotConfig {
    pub fn duopoly() -> Self {
        CournotConfig {
            firms: 2,
            intercept: default_intercept(),
            slope: default_slope(),
            min_quantity: default_min_quantity(),
            max_quantity: default_max_quantity(),
        }
    }

    pub fn triopoly() -> Self {
        CournotConfig { firms: 3, ..Self::duopoly() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.firms < 2 {
            return Err(Error::Config("Cournot competition needs at least 2 firms".into()));
        }
        if !(self.intercept > 0.0) || !(self.slope > 0.0) {
            return Err(Error::Config(format!(
                "inverse demand needs positive intercept and slope, got {} and {}",
                self.intercept, self.slope
            )));
        }
        if self.min_quantity < 1 || self.max_quantity <= self.min_quantity {
            return Err(Error::Config(format!(
                "quantity range [{}, {}] is invalid",
                self.min_quantity, self.max_quantity
            )));
        }
        Ok(())
    }

    pub fn action_space(&self) -> Result<ActionSpace> {
        ActionSpace::integers(self.min_quantity as i64, self.max_quantity as i64)
    }
}

/// Pure outcome map: quantities to (price, utilities). The price is floored
/// at zero when total quantity overruns the demand curve.
pub fn cournot_step(cfg: &CournotConfig, quantities: &[f64]) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    if quantities.len() != cfg.firms {
        return Err(Error::Dimension(format!(
            "{} quantities for {} firms",
            quantities.len(),
            cfg.firms
        )));
    }
    for &q in quantities {
        if !q.is_finite()
            || q.round() != q
            || q < cfg.min_quantity as f64
            || q > cfg.max_quantity as f64
        {
            return Err(Error::Data {
                line: None,
                message: format!(
                    "quantity {q} is not an integer in [{}, {}]",
                    cfg.min_quantity, cfg.max_quantity
                ),
            });
        }
    }
    let total: f64 = quantities.iter().sum();
    let price = (cfg.intercept - cfg.slope * total).max(0.0);
    let utilities = quantities.iter().map(|&q| price * q).collect();
    Ok((price, utilities))
}

/// One-shot quantity game behind the [`Environment`] trait. Counts how often
/// the price floor binds so long runs can report it.
pub struct CournotEnv {
    cfg: CournotConfig,
    space: ActionSpace,
    floor_hits: u64,
    steps: u64,
}

impl CournotEnv {
    pub fn new(cfg: CournotConfig) -> Result<Self> {
        cfg.validate()?;
        let space = cfg.action_space()?;
        Ok(CournotEnv { cfg, space, floor_hits: 0, steps: 0 })
    }

    pub fn config(&self) -> &CournotConfig {
        &self.cfg
    }
}

impl Environment for CournotEnv {
    fn num_agents(&self) -> usize {
        self.cfg.firms
    }

    fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    fn horizon(&self) -> usize {
        1
    }

    fn reset(&mut self) {}

    fn step(&mut self, actions: &[usize], _rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        check_joint_action(actions, self.cfg.firms, self.space.len())?;
        let quantities: Vec<f64> = actions.iter().map(|&a| self.space.value(a)).collect();
        let total: f64 = quantities.iter().sum();
        if self.cfg.intercept - self.cfg.slope * total < 0.0 {
            self.floor_hits += 1;
        }
        self.steps += 1;
        let (price, utilities) = cournot_step(&self.cfg, &quantities)?;
        Ok(StepOutcome { utilities, price: Some(price), done: true })
    }

    fn diagnostics(&self) -> Vec<String> {
        if self.floor_hits > 0 {
            vec![format!(
                "price floored at zero in {} of {} steps",
                self.floor_hits, self.steps
            )]
        } else {
            Vec::new()
        }
    }
}
