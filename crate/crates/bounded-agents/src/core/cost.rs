//! Information costs: KL divergence between a policy and its prior.
//!
//! The regularized reward an agent trains on is its raw utility minus
//! `lambda` times a KL penalty toward the prior. Two penalty variants exist:
//! the full divergence D(pi || q) of the current action distribution, and the
//! single-action contribution pi(a) ln(pi(a)/q(a)) credited to the action
//! actually taken. The contributions sum exactly to the divergence.

use crate::core::prior::PriorBelief;
use crate::error::{Error, Result};

fn check_lengths(pi: &[f64], q: &PriorBelief) -> Result<()> {
    if pi.len() != q.len() {
        return Err(Error::Dimension(format!(
            "policy has {} actions but prior has {}",
            pi.len(),
            q.len()
        )));
    }
    Ok(())
}

/// One action's share of the divergence: pi(a) ln(pi(a)/q(a)).
/// Zero policy mass contributes exactly 0; zero prior mass under positive
/// policy mass is an error (the divergence would be infinite).
pub fn kl_contribution(pi: &[f64], q: &PriorBelief, action: usize) -> Result<f64> {
    check_lengths(pi, q)?;
    if action >= pi.len() {
        return Err(Error::Dimension(format!(
            "action {action} out of range for {} actions",
            pi.len()
        )));
    }
    let p = pi[action];
    if !p.is_finite() || p < 0.0 {
        return Err(Error::Distribution(format!("policy probability {p} at index {action}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let qa = q.prob(action);
    if qa == 0.0 {
        return Err(Error::Distribution(format!(
            "prior gives zero mass to action {action} but the policy plays it"
        )));
    }
    Ok(p * (p / qa).ln())
}

/// Full divergence D(pi || q), summed in action-index order so that it equals
/// the sum of per-action contributions bit for bit.
pub fn kl_divergence(pi: &[f64], q: &PriorBelief) -> Result<f64> {
    check_lengths(pi, q)?;
    let mut total = 0.0;
    for a in 0..pi.len() {
        total += kl_contribution(pi, q, a)?;
    }
    Ok(total)
}

/// Utility net of the information cost: `u - lambda * penalty`.
pub fn regularized_reward(utility: f64, lambda: f64, penalty: f64) -> f64 {
    utility - lambda * penalty
}

/// Total variation distance between two distributions over the same actions:
/// half the L1 distance, in [0, 1].
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions must share support");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
