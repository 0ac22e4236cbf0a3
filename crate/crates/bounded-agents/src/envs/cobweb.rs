//! Cobweb commodity market with price prediction.
//!
//! Producers forecast the next market price on a fine grid. Supply reacts
//! non-linearly (tanh) to each forecast, demand is linear in price with a
//! Gaussian shock, and the realized price clears the two. Utility rewards
//! forecast accuracy alone, so the game is a coordination problem: if
//! everyone predicted the rational-expectations price the realized price
//! would fluctuate only by the shock. Runs over a long horizon, with the
//! previous realized price as the only state.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::core::ActionSpace;
use crate::envs::{check_joint_action, Environment, StepOutcome};
use crate::error::{Error, Result};

/// Utility at a perfect forecast.
pub const UTILITY_CEILING: f64 = 1300.0;
/// Quadratic utility falloff per squared unit of forecast error.
pub const UTILITY_CURVATURE: f64 = 260.0;

fn default_producers() -> usize {
    6
}
fn default_demand_intercept() -> f64 {
    13.8
}
fn default_demand_slope() -> f64 {
    1.5
}
fn default_supply_steepness() -> f64 {
    2.0
}
fn default_shock_std() -> f64 {
    0.5
}
fn default_price_lo() -> f64 {
    0.0
}
fn default_price_hi() -> f64 {
    10.0
}
fn default_price_step() -> f64 {
    0.1
}
fn default_horizon() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CobwebConfig {
    /// Number of forecasting producers. Also the center of the tanh supply
    /// curve, following the market design this reproduces.
    #[serde(default = "default_producers")]
    pub producers: usize,
    /// Demand curve intercept.
    #[serde(default = "default_demand_intercept")]
    pub demand_intercept: f64,
    /// Demand curve slope.
    #[serde(default = "default_demand_slope")]
    pub demand_slope: f64,
    /// Steepness of the tanh supply response to a forecast.
    #[serde(default = "default_supply_steepness")]
    pub supply_steepness: f64,
    /// Standard deviation of the additive price shock.
    #[serde(default = "default_shock_std")]
    pub shock_std: f64,
    /// Forecast grid.
    #[serde(default = "default_price_lo")]
    pub price_lo: f64,
    #[serde(default = "default_price_hi")]
    pub price_hi: f64,
    #[serde(default = "default_price_step")]
    pub price_step: f64,
    /// Steps per episode.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

impl Default for CobwebConfig {
    fn default() -> Self {
        CobwebConfig {
            producers: default_producers(),
            demand_intercept: default_demand_intercept(),
            demand_slope: default_demand_slope(),
            supply_steepness: default_supply_steepness(),
            shock_std: default_shock_std(),
            price_lo: default_price_lo(),
            price_hi: default_price_hi(),
            price_step: default_price_step(),
            horizon: default_horizon(),
        }
    }
}

impl CobwebConfig {
    /// Supply of one producer given its forecast.
    pub fn supply(&self, forecast: f64) -> f64 {
        (self.supply_steepness * (forecast - self.producers as f64)).tanh() + 1.0
    }

    /// Deterministic part of the realized price for the given forecasts.
    pub fn clearing_price(&self, forecasts: &[f64]) -> f64 {
        let total_supply: f64 = forecasts.iter().map(|&f| self.supply(f)).sum();
        (self.demand_intercept - total_supply) / self.demand_slope
    }

    pub fn validate(&self) -> Result<()> {
        if self.producers < 1 {
            return Err(Error::Config("cobweb market needs at least 1 producer".into()));
        }
        if !(self.demand_slope > 0.0) {
            return Err(Error::Config(format!(
                "demand slope must be positive, got {}",
                self.demand_slope
            )));
        }
        if !self.shock_std.is_finite() || self.shock_std < 0.0 {
            return Err(Error::Config(format!(
                "shock_std must be finite and >= 0, got {}",
                self.shock_std
            )));
        }
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        let space = self.action_space()?;
        // the grid must contain the shock-free fixed point of the market
        let eq = crate::equilibrium::cobweb_rational_price(self)?;
        if eq < space.lo() || eq > space.hi() {
            return Err(Error::Config(format!(
                "forecast grid [{}, {}] misses the equilibrium price {eq:.3}",
                space.lo(),
                space.hi()
            )));
        }
        Ok(())
    }

    pub fn action_space(&self) -> Result<ActionSpace> {
        ActionSpace::new(self.price_lo, self.price_hi, self.price_step)
    }
}

/// Pure outcome map: forecasts to (realized price, utilities). The RNG
/// supplies the demand shock; with `shock_std = 0` the price is
/// deterministic. The price itself is not floored; utilities are.
pub fn cobweb_step(
    cfg: &CobwebConfig,
    forecasts: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<f64>)> {
    if forecasts.len() != cfg.producers {
        return Err(Error::Dimension(format!(
            "{} forecasts for {} producers",
            forecasts.len(),
            cfg.producers
        )));
    }
    let shock = if cfg.shock_std > 0.0 {
        Normal::new(0.0, cfg.shock_std).expect("validated").sample(rng)
    } else {
        0.0
    };
    let price = cfg.clearing_price(forecasts) + shock;
    let utilities = forecasts
        .iter()
        .map(|&f| {
            let err = price - f;
            (UTILITY_CEILING - UTILITY_CURVATURE * err * err).max(0.0)
        })
        .collect();
    Ok((price, utilities))
}

/// Multi-step market behind the [`Environment`] trait. Each agent sees the
/// previous realized price (scaled by the grid top) as its only feature.
pub struct CobwebEnv {
    cfg: CobwebConfig,
    space: ActionSpace,
    last_price: f64,
    step_count: usize,
}

impl CobwebEnv {
    pub fn new(cfg: CobwebConfig) -> Result<Self> {
        cfg.validate()?;
        let space = cfg.action_space()?;
        let mid = 0.5 * (space.lo() + space.hi());
        Ok(CobwebEnv { cfg, space, last_price: mid, step_count: 0 })
    }

    pub fn config(&self) -> &CobwebConfig {
        &self.cfg
    }

    pub fn last_price(&self) -> f64 {
        self.last_price
    }
}

impl Environment for CobwebEnv {
    fn num_agents(&self) -> usize {
        self.cfg.producers
    }

    fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn env_feature_len(&self) -> usize {
        1
    }

    fn env_features(&self, _agent: usize) -> Vec<f64> {
        vec![self.last_price / self.space.hi()]
    }

    fn reset(&mut self) {
        self.last_price = 0.5 * (self.space.lo() + self.space.hi());
        self.step_count = 0;
    }

    fn step(&mut self, actions: &[usize], rng: &mut ChaCha8Rng) -> Result<StepOutcome> {
        check_joint_action(actions, self.cfg.producers, self.space.len())?;
        let forecasts: Vec<f64> = actions.iter().map(|&a| self.space.value(a)).collect();
        let (price, utilities) = cobweb_step(&self.cfg, &forecasts, rng)?;
        self.last_price = price;
        self.step_count += 1;
        Ok(StepOutcome {
            utilities,
            price: Some(price),
            done: self.step_count >= self.cfg.horizon,
        })
    }
}
