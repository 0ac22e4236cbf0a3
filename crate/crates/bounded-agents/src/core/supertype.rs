//! Agent supertypes: shared distributions over per-agent parameters.
//!
//! A supertype describes a population, not an individual. At the start of
//! every episode each agent draws its own rationality coefficient lambda from
//! N(mu, sigma) truncated at zero, where sigma = mu * sigma_star. Agents also
//! inherit the supertype's prior belief recipe. Conditioning the shared policy
//! on the drawn lambda lets one network represent the whole population.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::core::prior::{PriorBelief, PriorSpec};
use crate::core::space::ActionSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Supertype {
    mu: f64,
    sigma_star: f64,
    prior: PriorSpec,
}

impl Supertype {
    /// `mu` is the mean rationality coefficient, `sigma_star` the spread as a
    /// fraction of the mean (the actual standard deviation is `mu * sigma_star`).
    pub fn new(mu: f64, sigma_star: f64, prior: PriorSpec) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Config(format!("supertype mu must be finite and >= 0, got {mu}")));
        }
        if !sigma_star.is_finite() || sigma_star < 0.0 {
            return Err(Error::Config(format!(
                "supertype sigma_star must be finite and >= 0, got {sigma_star}"
            )));
        }
        Ok(Supertype { mu, sigma_star, prior })
    }

    /// Re-checks the constructor invariants; deserialized values skip them.
    pub fn validate(&self) -> Result<()> {
        Supertype::new(self.mu, self.sigma_star, self.prior.clone()).map(|_| ())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma_star(&self) -> f64 {
        self.sigma_star
    }

    /// Standard deviation of the lambda draw, always exactly `mu * sigma_star`.
    pub fn sigma(&self) -> f64 {
        self.mu * self.sigma_star
    }

    pub fn prior_spec(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn prior(&self, space: &ActionSpace) -> Result<PriorBelief> {
        self.prior.materialize(space)
    }

    /// One lambda draw, clipped at zero. A zero-width distribution returns
    /// exactly `mu` (the generator is still advanced so call sequences stay
    /// aligned across supertypes).
    pub fn sample_lambda(&self, rng: &mut ChaCha8Rng) -> f64 {
        let normal = Normal::new(self.mu, self.sigma()).expect("validated parameters");
        normal.sample(rng).max(0.0)
    }
}
