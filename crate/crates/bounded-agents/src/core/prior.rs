//! Prior beliefs over discrete actions.
//!
//! A prior is the anchor distribution the regularizer pulls the learned
//! policy toward. Priors are static for a run: they are materialized once
//! from a [`PriorSpec`] and an action grid, then shared by reference.

use serde::{Deserialize, Serialize};

use crate::core::space::ActionSpace;
use crate::error::{Error, Result};

/// A validated probability distribution over action indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorBelief {
    probs: Vec<f64>,
}

impl PriorBelief {
    /// Wraps an explicit probability vector. Entries must be finite and
    /// non-negative and sum to 1 within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Distribution("prior must have at least one action".into()));
        }
        let mut total = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Distribution(format!("prior probability {p} at index {i}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!("prior sums to {total}, expected 1")));
        }
        Ok(PriorBelief { probs })
    }

    /// Uniform distribution over `n` actions.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Distribution("prior must have at least one action".into()));
        }
        Ok(PriorBelief { probs: vec![1.0 / n as f64; n] })
    }

    /// Prior that up-weights "prominent" grid values (multiples of 5) by the
    /// given factor relative to the remaining values, then normalizes.
    /// Mimics the round-number bias seen in human pricing and quantity data.
    pub fn prominent_numbers(space: &ActionSpace, boost: f64) -> Result<Self> {
        if !boost.is_finite() || boost <= 0.0 {
            return Err(Error::Config(format!("prominence boost must be positive, got {boost}")));
        }
        let is_prominent = |v: f64| {
            let nearest = (v / 5.0).round() * 5.0;
            (v - nearest).abs() < 1e-9
        };
        if !space.values().any(is_prominent) {
            return Err(Error::Config(format!(
                "grid [{}, {}] step {} holds no multiples of 5 to make prominent",
                space.lo(),
                space.hi(),
                space.step()
            )));
        }
        let mut w: Vec<f64> = space
            .values()
            .map(|v| if is_prominent(v) { boost } else { 1.0 })
            .collect();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        Ok(PriorBelief { probs: w })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of one action index.
    pub fn prob(&self, action: usize) -> f64 {
        self.probs[action]
    }
}

/// Recipe for building a prior once the action grid is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSpec {
    Uniform,
    ProminentNumbers { boost: f64 },
}

impl PriorSpec {
    pub fn materialize(&self, space: &ActionSpace) -> Result<PriorBelief> {
        match self {
            PriorSpec::Uniform => PriorBelief::uniform(space.len()),
            PriorSpec::ProminentNumbers { boost } => PriorBelief::prominent_numbers(space, *boost),
        }
    }
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec::Uniform
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_sums_to_one() {
        let p = PriorBelief::uniform(3).unwrap();
        assert_eq!(p.probs(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn rejects_negative_and_unnormalized() {
        assert!(PriorBelief::new(vec![0.5, -0.5, 1.0]).is_err());
        assert!(PriorBelief::new(vec![0.5, 0.6]).is_err());
        assert!(PriorBelief::new(vec![]).is_err());
        assert!(PriorBelief::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn prominent_numbers_boost_multiples_of_five() {
        let space = ActionSpace::integers(1, 10).unwrap();
        let p = PriorBelief::prominent_numbers(&space, 3.0).unwrap();
        // values 5 and 10 get weight 3, the other eight get weight 1
        let total = 3.0 * 2.0 + 8.0;
        assert!((p.prob(4) - 3.0 / total).abs() < 1e-15);
        assert!((p.prob(9) - 3.0 / total).abs() < 1e-15);
        assert!((p.prob(0) - 1.0 / total).abs() < 1e-15);
        let sum: f64 = p.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prominent_numbers_with_unit_boost_is_uniform() {
        let space = ActionSpace::integers(8, 32).unwrap();
        let p = PriorBelief::prominent_numbers(&space, 1.0).unwrap();
        let u = PriorBelief::uniform(space.len()).unwrap();
        for (a, b) in p.probs().iter().zip(u.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn bad_boost_rejected() {
        let space = ActionSpace::integers(1, 10).unwrap();
        assert!(PriorBelief::prominent_numbers(&space, 0.0).is_err());
        assert!(PriorBelief::prominent_numbers(&space, -2.0).is_err());
    }

    #[test]
    fn grid_without_prominent_values_rejected() {
        let space = ActionSpace::integers(1, 4).unwrap();
        assert!(PriorBelief::prominent_numbers(&space, 3.0).is_err());
    }
}
