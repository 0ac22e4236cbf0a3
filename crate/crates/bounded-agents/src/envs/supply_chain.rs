//! Capacity allocation game between competing retailers.
//!
//! Two retailers face deterministic consumer demand `demand` each and order
//! stock from one supplier whose capacity `capacity` is below total demand.
//! The supplier allocates capacity in proportion to the orders, so ordering
//! more than needed is a way to grab share. Each retailer earns a margin on
//! demand it can serve, pays a wastage cost on stock beyond demand, and a
//! shortage cost on unmet demand. With proportional allocation the unique
//! equilibrium is to order the maximum allowed.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::ActionSpace;
use crate::envs::{check_joint_action, Environment, StepOutcome};
use crate::error::{Error, Result};

fn default_retailers() -> usize {
    2
}
fn default_capacity() -> f64 {
    90.0
}
fn default_demand() -> f64 {
    50.0
}
fn default_max_order() -> u32 {
    100
}
fn default_margin() -> f64 {
    5.0
}
fn default_wastage_cost() -> f64 {
    2.0
}
fn default_shortage_cost() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplyChainConfig {
    /// Number of competing retailers.
    #[serde(default = "default_retailers")]
    pub retailers: usize,
    /// Supplier capacity shared by all retailers.
    #[serde(default = "default_capacity")]
    pub capacity: f64,
    /// Consumer demand faced by each retailer.
    #[serde(default = "default_demand")]
    pub demand: f64,
    /// Orders are integers in `{1, ..., max_order}`.
    #[serde(default = "default_max_order")]
    pub max_order: u32,
    /// Profit per unit of demand served.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Cost per unit of allocated stock beyond demand.
    #[serde(default = "default_wastage_cost")]
    pub wastage_cost: f64,
    /// Cost per unit of unmet demand.
    #[serde(default = "default_shortage_cost")]
    pub shortage_cost: f64,
}

impl Default for SupplyChainConfig {
    fn default() -> Self {
        SupplyChainConfig {
            retailers: default_retailers(),
            capacity: default_capacity(),
            demand: default_demand(),
            max_order: default_max_order(),
            margin: default_margin(),
            wastage_cost: default_wastage_cost(),
            shortage_cost: default_shortage_cost(),
        }
    }
}

impl SupplyChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.retailers < 2 {
            return Err(Error::Config("supply chain needs at least 2 retailers".into()));
        }
        if !(self.capacity > 0.0) || !(self.demand > 0.0) {
            return Err(Error::Config("capacity and demand must be positive".into()));
        }
        if self.max_order < 1 {
            return Err(Error::Config("max_order must be at least 1".into()));
        }
        for (name, v) in [
            ("margin", self.margin),
            ("wastage_cost", self.wastage_cost),
            ("shortage_cost", self.shortage_cost),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn action_space(&self) -> Result<ActionSpace> {
        ActionSpace::integers(1, self.max_order as i64)
    }

    /// True when capacity binds: the supplier cannot cover total demand.
    pub fn capacity_binds(&self) -> bool {
        self.capacity < self.retailers as f64 * self.demand
    }
}

/// Pure outcome map: orders to (allocations, utilities).
///
/// The supplier always distributes its full capacity in proportion to the
/// orders, `y_i = capacity * x_i / sum(x)`. Utility is
/// `margin * demand - wastage_cost * excess - shortage_cost * unmet` where
/// excess and unmet compare the allocation to demand.
pub fn supply_chain_step(cfg: &SupplyChainConfig, orders: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    if orders.len() != cfg.retailers {
        return Err(Error::Dimension(format!(
            "{} orders for {} retailers",
            orders.len(),
            cfg.retailers
        )));
    }
    for &x in orders {
        if !x.is_finite() || x.round() != x || x < 1.0 || x > cfg.max_order as f64 {
            return Err(Error::Data {
                line: None,
                message: format!("order {x} is not an integer in [1, {}]", cfg.max_order),
            });
        }
    }
    let total: f64 = orders.iter().sum();
    let allocations: Vec<f64> = orders.iter().map(|x| cfg.capacity * x / total).collect();
    let utilities = allocations
        .iter()
        .map(|&y| {
            let excess = (y - cfg.demand).max(0.0);
            let unmet = (cfg.demand - y).max(0.0);
            cfg.margin * cfg.demand - cfg.wastage_cost * excess - cfg.shortage_cost * unmet
        })
        .collect();
    Ok((allocations, utilities))
}

/// One-shot allocation game behind the [`Environment`] trait.
pub struct SupplyChainEnv {
    cfg: SupplyChainConfig,
    space: ActionSpace,
}

impl SupplyChainEnv {
    pub fn new(cfg: SupplyChainConfig) -> Result<Self> {
        cfg.validate()?;
        let space = cfg.action_space()?;
        Ok(SupplyChainEnv { cfg, space })
    }

    pub fn config(&self) -> &SupplyChainConfig {
        &self.cfg
    }
}

impl Environment for SupplyChainEnv {
    fn num_agents(&self) -> usize {
        self.cfg.retailers
    }

    fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    fn horizon(&self) -> usize {
        1
    }

    fn reset(&mut self) {}

    fn step(&mut self, actions: &[usize], _rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        check_joint_action(actions, self.cfg.retailers, self.space.len())?;
        let orders: Vec<f64> = actions.iter().map(|&a| self.space.value(a)).collect();
        let (_, utilities) = supply_chain_step(&self.cfg, &orders)?;
        Ok(StepOutcome { utilities, price: None, done: true })
    }
}
