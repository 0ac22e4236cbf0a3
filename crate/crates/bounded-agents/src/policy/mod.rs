//! Shared softmax policy conditioned on agent identity, rationality, and
//! prior beliefs.
//!
//! One network serves every agent in a population. The observation it sees is
//! the concatenation of environment features, a normalized agent id, a
//! squashed rationality coefficient, and the agent's full prior vector, so a
//! single set of weights can express different behavior for different agents
//! and different regularization strengths.

mod net;

pub use net::{ForwardTrace, Mlp};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::core::PriorBelief;
use crate::error::{Error, Result};

/// Hidden layer widths used by both the policy and the value network.
pub const HIDDEN: [usize; 2] = [64, 64];

/// Gain applied to the policy output layer at initialization; keeps the
/// starting distribution near uniform.
pub const POLICY_OUTPUT_GAIN: f64 = 0.01;

/// Network input for one agent at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationVector {
    data: Vec<f64>,
}

impl ObservationVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Observation width for an environment with `env_feature_len` features and
/// `n_actions` actions: features, id code, rationality code, prior vector.
pub fn observation_len(env_feature_len: usize, n_actions: usize) -> usize {
    env_feature_len + 2 + n_actions
}

/// Builds the policy input. The id code is `agent_id / (num_agents - 1)`
/// (0 for a single agent) and the rationality code is `lambda / (1 + lambda)`,
/// both in [0, 1] so no feature dominates by scale.
pub fn encode_observation(
    env_features: &[f64],
    agent_id: usize,
    num_agents: usize,
    lambda: f64,
    prior: &PriorBelief,
) -> ObservationVector {
    assert!(num_agents > 0, "need at least one agent");
    assert!(agent_id < num_agents, "agent {agent_id} out of range for {num_agents}");
    assert!(lambda.is_finite() && lambda >= 0.0, "lambda must be finite and >= 0");
    let id_code = if num_agents > 1 { agent_id as f64 / (num_agents - 1) as f64 } else { 0.0 };
    let mut data = Vec::with_capacity(observation_len(env_features.len(), prior.len()));
    data.extend_from_slice(env_features);
    data.push(id_code);
    data.push(lambda / (1.0 + lambda));
    data.extend_from_slice(prior.probs());
    ObservationVector { data }
}

/// A categorical action distribution with probabilities kept alongside
/// log-probabilities (computed stably from shifted logits).
#[derive(Debug, Clone)]
pub struct ActionDistribution {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

impl ActionDistribution {
    /// Softmax of raw logits, stabilized by subtracting the maximum.
    pub fn from_logits(logits: &[f64]) -> Result<Self> {
        if logits.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("policy logits {logits:?}")));
        }
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|&x| (x - m).exp()).collect();
        let z: f64 = exps.iter().sum();
        let ln_z = z.ln();
        let probs = exps.iter().map(|e| e / z).collect();
        let log_probs = logits.iter().map(|&x| x - m - ln_z).collect();
        Ok(ActionDistribution { probs, log_probs })
    }

    /// Wraps an explicit probability vector (finite, non-negative entries
    /// summing to 1 within 1e-9). Zero-mass actions get log-probability
    /// negative infinity.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        let mut total = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Distribution(format!("probability {p} at index {i}")));
            }
            total += p;
        }
        if probs.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(ActionDistribution {
            probs: probs.to_vec(),
            log_probs: probs.iter().map(|p| p.ln()).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_prob(&self, action: usize) -> f64 {
        self.log_probs[action]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Inverse-CDF sample in action-index order.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (a, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return a;
            }
        }
        self.probs.len() - 1
    }

    /// Highest-probability action, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for a in 1..self.probs.len() {
            if self.probs[a] > self.probs[best] {
                best = a;
            }
        }
        best
    }
}

/// Softmax policy head over a dense network.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    net: Mlp,
}

impl Policy {
    /// Fresh policy for the given observation width and action count:
    /// orthogonal hidden layers, a damped output layer, zero biases.
    pub fn init(obs_len: usize, n_actions: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let sizes = [&[obs_len], &HIDDEN[..], &[n_actions]].concat();
        Ok(Policy { net: Mlp::orthogonal_init(&sizes, POLICY_OUTPUT_GAIN, rng)? })
    }

    pub fn from_net(net: Mlp) -> Self {
        Policy { net }
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut Mlp {
        &mut self.net
    }

    pub fn obs_len(&self) -> usize {
        self.net.input_len()
    }

    pub fn n_actions(&self) -> usize {
        self.net.output_len()
    }

    pub fn forward(&self, obs: &ObservationVector) -> Result<ActionDistribution> {
        if obs.len() != self.obs_len() {
            return Err(Error::Dimension(format!(
                "observation has {} features, policy expects {}",
                obs.len(),
                self.obs_len()
            )));
        }
        ActionDistribution::from_logits(&self.net.forward(obs.as_slice()))
    }

    /// Log-probability of `action` under the current parameters together with
    /// its exact gradient with respect to every parameter.
    pub fn log_prob_and_grad(&self, obs: &ObservationVector, action: usize) -> Result<(f64, Vec<f64>)> {
        if obs.len() != self.obs_len() {
            return Err(Error::Dimension(format!(
                "observation has {} features, policy expects {}",
                obs.len(),
                self.obs_len()
            )));
        }
        if action >= self.n_actions() {
            return Err(Error::Dimension(format!(
                "action {action} out of range for {} actions",
                self.n_actions()
            )));
        }
        let (logits, trace) = self.net.forward_traced(obs.as_slice());
        let dist = ActionDistribution::from_logits(&logits)?;
        // d log pi(a) / d logit_k = [k == a] - pi(k)
        let seed: Vec<f64> = (0..dist.len())
            .map(|k| (k == action) as u8 as f64 - dist.probs[k])
            .collect();
        let mut grad = vec![0.0; self.net.params().len()];
        self.net.backward(&trace, &seed, &mut grad);
        Ok((dist.log_prob(action), grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{total_variation, PriorBelief};
    use crate::rng::stream;

    #[test]
    fn encoding_layout_single_agent() {
        let prior = PriorBelief::uniform(3).unwrap();
        let obs = encode_observation(&[], 0, 1, 0.0, &prior);
        assert_eq!(obs.as_slice(), &[0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn encoding_layout_multi_agent() {
        let prior = PriorBelief::uniform(2).unwrap();
        let obs = encode_observation(&[0.52], 2, 3, 1.0, &prior);
        assert_eq!(obs.as_slice(), &[0.52, 1.0, 0.5, 0.5, 0.5]);
        let obs = encode_observation(&[0.52], 1, 3, 3.0, &prior);
        assert_eq!(obs.as_slice(), &[0.52, 0.5, 0.75, 0.5, 0.5]);
    }

    #[test]
    fn rationality_code_saturates() {
        let prior = PriorBelief::uniform(2).unwrap();
        let o = encode_observation(&[], 0, 1, 1e9, &prior);
        assert!(o.as_slice()[1] > 0.999_999);
        assert!(o.as_slice()[1] < 1.0);
    }

    #[test]
    fn softmax_is_shift_invariant_and_normalized() {
        let d1 = ActionDistribution::from_logits(&[1.0, 2.0, 3.0]).unwrap();
        let d2 = ActionDistribution::from_logits(&[1001.0, 1002.0, 1003.0]).unwrap();
        assert!(total_variation(d1.probs(), d2.probs()) < 1e-12);
        let s: f64 = d1.probs().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        for a in 0..3 {
            assert!((d1.log_prob(a) - d1.probs()[a].ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn extreme_logits_stay_finite() {
        let d = ActionDistribution::from_logits(&[800.0, -800.0]).unwrap();
        assert!((d.probs()[0] - 1.0).abs() < 1e-12);
        assert!(d.log_prob(1).is_finite());
        assert!(d.log_prob(1) < -1000.0);
        assert!(ActionDistribution::from_logits(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn fresh_policy_is_near_uniform() {
        let mut rng = stream(1, &[]);
        let policy = Policy::init(7, 25, &mut rng).unwrap();
        let obs = ObservationVector { data: vec![0.3; 7] };
        let dist = policy.forward(&obs).unwrap();
        let uniform = vec![1.0 / 25.0; 25];
        assert!(total_variation(dist.probs(), &uniform) < 0.02);
    }

    #[test]
    fn sampling_respects_probabilities() {
        let d = ActionDistribution::from_logits(&[2.0f64.ln(), 0.0, 0.0]).unwrap();
        let mut rng = stream(8, &[]);
        let n = 40_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[d.sample(&mut rng)] += 1;
        }
        for a in 0..3 {
            let f = counts[a] as f64 / n as f64;
            assert!((f - d.probs()[a]).abs() < 0.01, "action {a}: {f} vs {}", d.probs()[a]);
        }
    }

    #[test]
    fn log_prob_grad_matches_finite_differences() {
        let mut rng = stream(21, &[]);
        let mut policy = Policy::init(6, 4, &mut rng).unwrap();
        let obs = ObservationVector { data: vec![0.1, -0.4, 0.9, 0.0, 0.3, -0.2] };
        let action = 2;
        let (_, grad) = policy.log_prob_and_grad(&obs, action).unwrap();
        let h = 1e-5;
        let n = policy.net().params().len();
        for i in (0..n).step_by(97) {
            let orig = policy.net().params()[i];
            policy.net_mut().params_mut()[i] = orig + h;
            let up = policy.forward(&obs).unwrap().log_prob(action);
            policy.net_mut().params_mut()[i] = orig - h;
            let dn = policy.forward(&obs).unwrap().log_prob(action);
            policy.net_mut().params_mut()[i] = orig;
            let fd = (up - dn) / (2.0 * h);
            let denom = fd.abs().max(grad[i].abs()).max(1e-8);
            assert!((fd - grad[i]).abs() / denom < 1e-5, "param {i}: {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn zero_net_softmax_gradient_is_analytic() {
        // with all parameters zero the distribution is uniform over 2 actions
        // and d log pi(0) / d bias = (+0.5, -0.5) on the output layer
        let net = Mlp::zeros(&[1, 2]).unwrap();
        let policy = Policy::from_net(net);
        let obs = ObservationVector { data: vec![0.0] };
        let (lp, grad) = policy.log_prob_and_grad(&obs, 0).unwrap();
        assert!((lp - 0.5f64.ln()).abs() < 1e-15);
        // layout: W (2x1) then b (2)
        assert_eq!(&grad[2..], &[0.5, -0.5]);
    }
}
