//! Policy-gradient training on information-cost-regularized rewards.
//!
//! Each iteration collects a batch of episodes with freshly drawn per-agent
//! rationality coefficients, estimates advantages over the regularized
//! rewards with a learned baseline, and applies a clipped-surrogate update.
//!
//! The KL penalty enters in one of two modes. `per_action` charges each
//! logged action its own share of the divergence, pi(a) ln(pi(a)/q(a)), as
//! plain reward data. `exact` (the default) charges the full divergence of
//! the conditional distribution in the reward channel and, because that
//! penalty is the same for every action taken in a state, also differentiates
//! it directly in the loss; the advantage channel alone would never see it.
//! The direct term is scaled by the same factor as the normalized advantages
//! so the two channels keep the weighting the objective prescribes.

mod adam;

pub use adam::Adam;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::{
    kl_contribution, kl_divergence, regularized_reward, PriorBelief, Supertype,
};
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::policy::{
    encode_observation, observation_len, ActionDistribution, Mlp, ObservationVector, Policy,
    HIDDEN,
};
use crate::rng::stream;

const SEED_TAG_INIT: u64 = 1;
const SEED_TAG_ROLLOUT: u64 = 2;

/// How the information cost is charged during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlMode {
    /// Charge the logged action its own divergence share as reward data.
    PerAction,
    /// Charge the full divergence and differentiate it directly.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub iterations: usize,
    pub episodes_per_iteration: usize,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_epsilon: f64,
    pub learning_rate: f64,
    /// Full gradient passes over the batch per iteration.
    pub minibatch_epochs: usize,
    pub seed: u64,
    pub kl_mode: KlMode,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig::reference()
    }
}

impl TrainingConfig {
    /// Full-scale protocol: 500 iterations.
    pub fn reference() -> Self {
        TrainingConfig {
            iterations: 500,
            episodes_per_iteration: 128,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_epsilon: 0.2,
            learning_rate: 5e-3,
            minibatch_epochs: 4,
            seed: 0,
            kl_mode: KlMode::Exact,
        }
    }

    /// Reduced budget for quick runs and continuous testing.
    pub fn desk() -> Self {
        TrainingConfig { iterations: 150, ..TrainingConfig::reference() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.episodes_per_iteration < 1 {
            return Err(Error::Config("episodes_per_iteration must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return Err(Error::Config(format!(
                "gae_lambda must lie in [0, 1], got {}",
                self.gae_lambda
            )));
        }
        if !(self.clip_epsilon > 0.0) {
            return Err(Error::Config(format!(
                "clip_epsilon must be positive, got {}",
                self.clip_epsilon
            )));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.minibatch_epochs < 1 {
            return Err(Error::Config("minibatch_epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// One logged step for one agent.
#[derive(Debug, Clone)]
pub struct Transition {
    pub obs: ObservationVector,
    pub action: usize,
    pub raw_utility: f64,
    pub kl_penalty: f64,
    pub regularized_reward: f64,
    pub log_prob_at_collection: f64,
    pub lambda: f64,
    pub agent_id: usize,
}

/// Location of one episode inside the flat transition list: transitions are
/// stored step-major, agent-minor, so index `start + t * agents + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeSpan {
    pub start: usize,
    pub steps: usize,
    pub agents: usize,
}

#[derive(Debug, Clone)]
pub struct RolloutBatch {
    pub transitions: Vec<Transition>,
    pub episodes: Vec<EpisodeSpan>,
    pub num_agents: usize,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn mean_raw_utility(&self) -> f64 {
        self.transitions.iter().map(|t| t.raw_utility).sum::<f64>() / self.len() as f64
    }

    pub fn mean_kl_penalty(&self) -> f64 {
        self.transitions.iter().map(|t| t.kl_penalty).sum::<f64>() / self.len() as f64
    }

    pub fn mean_regularized_reward(&self) -> f64 {
        self.transitions.iter().map(|t| t.regularized_reward).sum::<f64>() / self.len() as f64
    }
}

fn supertype_for(supertypes: &[Supertype], agent: usize) -> &Supertype {
    if supertypes.len() == 1 {
        &supertypes[0]
    } else {
        &supertypes[agent]
    }
}

/// Checks the supertype list against the agent count: either one shared
/// supertype or exactly one per agent.
pub fn check_supertypes(supertypes: &[Supertype], num_agents: usize) -> Result<()> {
    if supertypes.is_empty() || (supertypes.len() != 1 && supertypes.len() != num_agents) {
        return Err(Error::Dimension(format!(
            "{} supertypes for {} agents (need 1 shared or one per agent)",
            supertypes.len(),
            num_agents
        )));
    }
    Ok(())
}

/// Plays `cfg.episodes_per_iteration` episodes under the current policy.
/// Every episode draws a fresh rationality coefficient per agent from its
/// supertype, so one batch spans a range of regularization strengths.
pub fn collect_rollouts(
    env: &mut dyn Environment,
    policy: &Policy,
    supertypes: &[Supertype],
    priors: &[PriorBelief],
    cfg: &TrainingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RolloutBatch> {
    let num_agents = env.num_agents();
    check_supertypes(supertypes, num_agents)?;
    if priors.len() != num_agents {
        return Err(Error::Dimension(format!(
            "{} priors for {num_agents} agents",
            priors.len()
        )));
    }
    let mut transitions = Vec::new();
    let mut episodes = Vec::new();
    for _ in 0..cfg.episodes_per_iteration {
        let lambdas: Vec<f64> = (0..num_agents)
            .map(|i| supertype_for(supertypes, i).sample_lambda(rng))
            .collect();
        env.reset();
        let start = transitions.len();
        let mut steps = 0;
        for _ in 0..env.horizon() {
            let mut actions = Vec::with_capacity(num_agents);
            let mut step_records = Vec::with_capacity(num_agents);
            for i in 0..num_agents {
                let obs = encode_observation(
                    &env.env_features(i),
                    i,
                    num_agents,
                    lambdas[i],
                    &priors[i],
                );
                let dist = policy.forward(&obs)?;
                let action = dist.sample(rng);
                let kl_penalty = match cfg.kl_mode {
                    KlMode::PerAction => kl_contribution(dist.probs(), &priors[i], action)?,
                    KlMode::Exact => kl_divergence(dist.probs(), &priors[i])?,
                };
                step_records.push((obs, action, dist.log_prob(action), kl_penalty));
                actions.push(action);
            }
            let outcome = env.step(&actions, rng)?;
            if outcome.utilities.len() != num_agents {
                return Err(Error::Dimension(format!(
                    "environment returned {} utilities for {num_agents} agents",
                    outcome.utilities.len()
                )));
            }
            for (i, (obs, action, log_prob, kl_penalty)) in step_records.into_iter().enumerate() {
                let u = outcome.utilities[i];
                transitions.push(Transition {
                    obs,
                    action,
                    raw_utility: u,
                    kl_penalty,
                    regularized_reward: regularized_reward(u, lambdas[i], kl_penalty),
                    log_prob_at_collection: log_prob,
                    lambda: lambdas[i],
                    agent_id: i,
                });
            }
            steps += 1;
            if outcome.done {
                break;
            }
        }
        episodes.push(EpisodeSpan { start, steps, agents: num_agents });
    }
    Ok(RolloutBatch { transitions, episodes, num_agents })
}

/// Advantage and return targets for one batch. `advantages` are normalized
/// to zero mean and unit scale; `scale` records the divisor used (1 when the
/// batch had no variance and the advantages were zeroed) so loss terms that
/// must stay commensurate with the advantages can divide by it too.
#[derive(Debug, Clone)]
pub struct AdvantageEstimates {
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
    pub mean: f64,
    pub scale: f64,
}

/// Generalized advantage estimation over the regularized rewards, run
/// separately along each (episode, agent) trajectory, followed by batch
/// normalization.
pub fn compute_advantages(
    batch: &RolloutBatch,
    gamma: f64,
    gae_lambda: f64,
    value: &Mlp,
) -> AdvantageEstimates {
    let n = batch.len();
    let values: Vec<f64> =
        batch.transitions.iter().map(|t| value.forward(t.obs.as_slice())[0]).collect();
    let mut advantages = vec![0.0; n];
    let mut returns = vec![0.0; n];
    for span in &batch.episodes {
        for agent in 0..span.agents {
            let mut carried = 0.0;
            for t in (0..span.steps).rev() {
                let idx = span.start + t * span.agents + agent;
                let next_value = if t + 1 == span.steps {
                    0.0
                } else {
                    values[span.start + (t + 1) * span.agents + agent]
                };
                let delta =
                    batch.transitions[idx].regularized_reward + gamma * next_value - values[idx];
                carried = delta + gamma * gae_lambda * carried;
                advantages[idx] = carried;
                returns[idx] = carried + values[idx];
            }
        }
    }
    let mean = advantages.iter().sum::<f64>() / n as f64;
    let var = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    if std > 1e-8 {
        for a in &mut advantages {
            *a = (*a - mean) / std;
        }
        AdvantageEstimates { advantages, returns, mean, scale: std }
    } else {
        for a in &mut advantages {
            *a = 0.0;
        }
        AdvantageEstimates { advantages, returns, mean, scale: 1.0 }
    }
}

/// Optimizer state carried across iterations.
#[derive(Debug, Clone)]
pub struct Optimizers {
    pub policy: Adam,
    pub value: Adam,
}

impl Optimizers {
    pub fn new(cfg: &TrainingConfig, policy: &Policy, value: &Mlp) -> Self {
        Optimizers {
            policy: Adam::new(cfg.learning_rate, policy.net().params().len()),
            value: Adam::new(cfg.learning_rate, value.params().len()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
}

/// One training update: `minibatch_epochs` full passes of clipped-surrogate
/// ascent on the policy and squared-error regression on the value net.
/// Returns fresh parameter sets; the inputs are left untouched.
pub fn ppo_update(
    policy: &Policy,
    value: &Mlp,
    batch: &RolloutBatch,
    adv: &AdvantageEstimates,
    priors: &[PriorBelief],
    cfg: &TrainingConfig,
    opt: &mut Optimizers,
) -> Result<(Policy, Mlp, UpdateStats)> {
    if batch.is_empty() {
        return Err(Error::Config("cannot update on an empty batch".into()));
    }
    let n = batch.len();
    let scale_inv = 1.0 / adv.scale;
    let mut new_policy = policy.clone();
    let mut new_value = value.clone();
    let mut stats = UpdateStats { policy_loss: 0.0, value_loss: 0.0 };
    for _ in 0..cfg.minibatch_epochs {
        let mut policy_grad = vec![0.0; new_policy.net().params().len()];
        let mut value_grad = vec![0.0; new_value.params().len()];
        let mut policy_loss = 0.0;
        let mut value_loss = 0.0;
        for (idx, tr) in batch.transitions.iter().enumerate() {
            let (logits, trace) = new_policy.net().forward_traced(tr.obs.as_slice());
            let dist = ActionDistribution::from_logits(&logits)?;
            let log_prob = dist.log_prob(tr.action);
            let ratio = (log_prob - tr.log_prob_at_collection).exp();
            let a_hat = adv.advantages[idx];
            let clipped = ratio.clamp(1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
            policy_loss -= (ratio * a_hat).min(clipped * a_hat);
            // the unclipped branch carries gradient only while the ratio has
            // not left the trust region in the direction the advantage pushes
            let active = if a_hat >= 0.0 {
                ratio <= 1.0 + cfg.clip_epsilon
            } else {
                ratio >= 1.0 - cfg.clip_epsilon
            };
            let mut seed = vec![0.0; dist.len()];
            if active && a_hat != 0.0 {
                let w = -ratio * a_hat / n as f64;
                for (k, s) in seed.iter_mut().enumerate() {
                    let indicator = (k == tr.action) as u8 as f64;
                    *s = w * (indicator - dist.probs()[k]);
                }
            }
            if cfg.kl_mode == KlMode::Exact && tr.lambda > 0.0 {
                let prior = &priors[tr.agent_id];
                let div = kl_divergence(dist.probs(), prior)?;
                let w = tr.lambda * scale_inv / n as f64;
                policy_loss += tr.lambda * scale_inv * div;
                for (k, s) in seed.iter_mut().enumerate() {
                    let p = dist.probs()[k];
                    if p > 0.0 {
                        *s += w * p * ((p / prior.prob(k)).ln() - div);
                    }
                }
            }
            new_policy.net().backward(&trace, &seed, &mut policy_grad);

            let (v_out, v_trace) = new_value.forward_traced(tr.obs.as_slice());
            let diff = v_out[0] - adv.returns[idx];
            value_loss += 0.5 * diff * diff;
            new_value.backward(&v_trace, &[diff / n as f64], &mut value_grad);
        }
        policy_loss /= n as f64;
        value_loss /= n as f64;
        if !policy_loss.is_finite() || !value_loss.is_finite() {
            return Err(Error::NonFinite(format!(
                "training loss diverged (policy {policy_loss}, value {value_loss}, \
                 batch of {n}, advantage scale {})",
                adv.scale
            )));
        }
        opt.policy.step(new_policy.net_mut().params_mut(), &policy_grad);
        opt.value.step(new_value.params_mut(), &value_grad);
        stats = UpdateStats { policy_loss, value_loss };
    }
    Ok((new_policy, new_value, stats))
}

/// One point of the training curve: batch means per iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingCurvePoint {
    pub iteration: usize,
    pub mean_raw_utility: f64,
    pub mean_kl_penalty: f64,
    pub mean_regularized_reward: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingOutput {
    pub policy: Policy,
    pub value: Mlp,
    pub curve: Vec<TrainingCurvePoint>,
    /// Prior actually used per agent, in agent order.
    pub priors: Vec<PriorBelief>,
}

/// Builds the value network: same body as the policy, scalar head.
pub fn value_init(obs_len: usize, rng: &mut ChaCha8Rng) -> Result<Mlp> {
    let sizes = [&[obs_len], &HIDDEN[..], &[1]].concat();
    Mlp::orthogonal_init(&sizes, 1.0, rng)
}

/// Full training loop: collect, estimate advantages, update, repeat.
/// Deterministic for a given config; the seed drives initialization, every
/// episode, and nothing else.
pub fn train(
    env: &mut dyn Environment,
    supertypes: &[Supertype],
    cfg: &TrainingConfig,
) -> Result<TrainingOutput> {
    cfg.validate()?;
    let num_agents = env.num_agents();
    check_supertypes(supertypes, num_agents)?;
    let space = env.action_space().clone();
    let priors: Vec<PriorBelief> = (0..num_agents)
        .map(|i| supertype_for(supertypes, i).prior(&space))
        .collect::<Result<_>>()?;
    let obs_len = observation_len(env.env_feature_len(), space.len());
    let mut init_rng = stream(cfg.seed, &[SEED_TAG_INIT]);
    let mut policy = Policy::init(obs_len, space.len(), &mut init_rng)?;
    let mut value = value_init(obs_len, &mut init_rng)?;
    let mut opt = Optimizers::new(cfg, &policy, &value);
    let mut curve = Vec::with_capacity(cfg.iterations);
    for iteration in 0..cfg.iterations {
        let mut rng = stream(cfg.seed, &[SEED_TAG_ROLLOUT, iteration as u64]);
        let batch = collect_rollouts(env, &policy, supertypes, &priors, cfg, &mut rng)?;
        let adv = compute_advantages(&batch, cfg.gamma, cfg.gae_lambda, &value);
        let (p, v, _) = ppo_update(&policy, &value, &batch, &adv, &priors, cfg, &mut opt)
            .map_err(|e| match e {
                Error::NonFinite(msg) => {
                    Error::NonFinite(format!("iteration {iteration}: {msg}"))
                }
                other => other,
            })?;
        policy = p;
        value = v;
        curve.push(TrainingCurvePoint {
            iteration,
            mean_raw_utility: batch.mean_raw_utility(),
            mean_kl_penalty: batch.mean_kl_penalty(),
            mean_regularized_reward: batch.mean_regularized_reward(),
        });
    }
    Ok(TrainingOutput { policy, value, curve, priors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{total_variation, PriorSpec};
    use crate::envs::{MatrixGame, MatrixGameEnv};

    fn bandit_env(payoffs: Vec<f64>) -> MatrixGameEnv {
        MatrixGameEnv::all_learning(MatrixGame::bandit(payoffs).unwrap()).unwrap()
    }

    fn uniform_supertype(mu: f64) -> Supertype {
        Supertype::new(mu, 0.0, PriorSpec::Uniform).unwrap()
    }

    fn bandit_policy_probs(out: &TrainingOutput, lambda: f64) -> Vec<f64> {
        let obs = encode_observation(&[], 0, 1, lambda, &out.priors[0]);
        out.policy.forward(&obs).unwrap().probs().to_vec()
    }

    fn quick_cfg(iterations: usize, kl_mode: KlMode) -> TrainingConfig {
        TrainingConfig {
            iterations,
            episodes_per_iteration: 64,
            seed: 5,
            kl_mode,
            ..TrainingConfig::reference()
        }
    }

    #[test]
    fn bookkeeping_identity_holds_per_transition() {
        let mut env = bandit_env(vec![1.0, 0.0]);
        let types = [Supertype::new(1.0, 0.5, PriorSpec::Uniform).unwrap()];
        let priors = [PriorBelief::uniform(2).unwrap()];
        let cfg = quick_cfg(1, KlMode::Exact);
        let mut rng = stream(3, &[]);
        let policy = Policy::init(4, 2, &mut rng).unwrap();
        let batch =
            collect_rollouts(&mut env, &policy, &types, &priors, &cfg, &mut rng).unwrap();
        assert_eq!(batch.len(), 64);
        for tr in &batch.transitions {
            assert_eq!(
                tr.regularized_reward,
                regularized_reward(tr.raw_utility, tr.lambda, tr.kl_penalty)
            );
            assert!(tr.lambda >= 0.0);
        }
    }

    #[test]
    fn collection_is_deterministic() {
        let types = [Supertype::new(0.5, 1.0, PriorSpec::Uniform).unwrap()];
        let priors = [PriorBelief::uniform(2).unwrap()];
        let cfg = quick_cfg(1, KlMode::Exact);
        let mut rng = stream(9, &[]);
        let policy = Policy::init(4, 2, &mut rng).unwrap();
        let run = |seed: u64| {
            let mut env = bandit_env(vec![1.0, 0.0]);
            let mut rng = stream(seed, &[]);
            let b = collect_rollouts(&mut env, &policy, &types, &priors, &cfg, &mut rng).unwrap();
            b.transitions
                .iter()
                .map(|t| (t.action, t.lambda.to_bits(), t.regularized_reward.to_bits()))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn gae_degenerate_cases() {
        // hand-built batch: one episode, two steps, one agent
        let obs = |x: f64| encode_observation(&[x], 0, 1, 0.0, &PriorBelief::uniform(2).unwrap());
        let tr = |o: ObservationVector, r: f64| Transition {
            obs: o,
            action: 0,
            raw_utility: r,
            kl_penalty: 0.0,
            regularized_reward: r,
            log_prob_at_collection: 0.5f64.ln(),
            lambda: 0.0,
            agent_id: 0,
        };
        let batch = RolloutBatch {
            transitions: vec![tr(obs(0.1), 1.0), tr(obs(0.9), 3.0)],
            episodes: vec![EpisodeSpan { start: 0, steps: 2, agents: 1 }],
            num_agents: 1,
        };
        let zero_value = Mlp::zeros(&[5, 1]).unwrap();
        // gamma 0: return targets equal immediate rewards
        let adv = compute_advantages(&batch, 0.0, 0.95, &zero_value);
        assert_eq!(adv.returns, vec![1.0, 3.0]);
        // zero critic: raw advantage equals discounted reward-to-go
        let adv = compute_advantages(&batch, 0.5, 1.0, &zero_value);
        assert_eq!(adv.returns, vec![1.0 + 0.5 * 3.0, 3.0]);
        // normalization: mean zero, scale recoverable
        let raw: Vec<f64> = adv
            .advantages
            .iter()
            .map(|a| a * adv.scale + adv.mean)
            .collect();
        assert!((raw[0] - 2.5).abs() < 1e-12);
        assert!((raw[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_rewards_zero_the_advantages() {
        let prior = PriorBelief::uniform(2).unwrap();
        let mk = |_: usize| Transition {
            obs: encode_observation(&[], 0, 1, 0.0, &prior),
            action: 0,
            raw_utility: 2.0,
            kl_penalty: 0.0,
            regularized_reward: 2.0,
            log_prob_at_collection: 0.5f64.ln(),
            lambda: 0.0,
            agent_id: 0,
        };
        let batch = RolloutBatch {
            transitions: (0..6).map(mk).collect(),
            episodes: (0..6).map(|e| EpisodeSpan { start: e, steps: 1, agents: 1 }).collect(),
            num_agents: 1,
        };
        let zero_value = Mlp::zeros(&[4, 1]).unwrap();
        let adv = compute_advantages(&batch, 0.99, 0.95, &zero_value);
        assert!(adv.advantages.iter().all(|&a| a == 0.0));
        assert_eq!(adv.scale, 1.0);
    }

    #[test]
    fn zero_advantages_leave_policy_parameters_unchanged() {
        let mut env = bandit_env(vec![2.0, 2.0]);
        let types = [uniform_supertype(0.0)];
        let priors = [PriorBelief::uniform(2).unwrap()];
        let cfg = quick_cfg(1, KlMode::Exact);
        let mut rng = stream(11, &[]);
        let policy = Policy::init(4, 2, &mut rng).unwrap();
        let value = value_init(4, &mut rng).unwrap();
        let mut collect_rng = stream(1, &[]);
        let batch =
            collect_rollouts(&mut env, &policy, &types, &priors, &cfg, &mut collect_rng).unwrap();
        let adv = compute_advantages(&batch, cfg.gamma, cfg.gae_lambda, &value);
        assert!(adv.advantages.iter().all(|&a| a == 0.0));
        let mut opt = Optimizers::new(&cfg, &policy, &value);
        let (p, v, _) = ppo_update(&policy, &value, &batch, &adv, &priors, &cfg, &mut opt).unwrap();
        assert_eq!(p.net().params(), policy.net().params());
        assert_ne!(v.params(), value.params());
    }

    #[test]
    fn unregularized_bandit_learns_the_argmax() {
        let mut env = bandit_env(vec![1.0, 0.0]);
        let out = train(&mut env, &[uniform_supertype(0.0)], &quick_cfg(120, KlMode::Exact))
            .unwrap();
        let probs = bandit_policy_probs(&out, 0.0);
        assert!(probs[0] >= 0.99, "best arm probability {}", probs[0]);
    }

    #[test]
    fn regularized_bandit_approaches_softmax_fixed_point() {
        let mut env = bandit_env(vec![1.0, 0.0]);
        let out = train(&mut env, &[uniform_supertype(1.0)], &quick_cfg(150, KlMode::Exact))
            .unwrap();
        let probs = bandit_policy_probs(&out, 1.0);
        let e = std::f64::consts::E;
        let target = [e / (e + 1.0), 1.0 / (e + 1.0)];
        assert!(
            total_variation(&probs, &target) < 0.05,
            "got {probs:?}, want about {target:?}"
        );
    }

    #[test]
    fn zero_lambda_makes_both_kl_modes_identical() {
        let run = |mode: KlMode| {
            let mut env = bandit_env(vec![1.0, 0.0]);
            train(&mut env, &[uniform_supertype(0.0)], &quick_cfg(20, mode))
                .unwrap()
                .policy
                .net()
                .params()
                .to_vec()
        };
        let a = run(KlMode::Exact);
        let b = run(KlMode::PerAction);
        assert_eq!(a, b, "with lambda 0 the penalty mode cannot matter");
    }

    #[test]
    fn training_is_deterministic() {
        let run = || {
            let mut env = bandit_env(vec![1.0, 0.0]);
            train(&mut env, &[uniform_supertype(0.5)], &quick_cfg(10, KlMode::Exact))
                .unwrap()
                .policy
                .net()
                .params()
                .to_vec()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn curve_has_expected_shape_and_lambda_zero_reward_equality() {
        let mut env = bandit_env(vec![1.0, 0.0]);
        let out = train(&mut env, &[uniform_supertype(0.0)], &quick_cfg(5, KlMode::Exact))
            .unwrap();
        assert_eq!(out.curve.len(), 5);
        for (i, pt) in out.curve.iter().enumerate() {
            assert_eq!(pt.iteration, i);
            // lambda 0: regularized reward must equal raw utility exactly
            assert_eq!(pt.mean_raw_utility, pt.mean_regularized_reward);
            assert!(pt.mean_kl_penalty >= 0.0);
        }
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = TrainingConfig::reference();
        cfg.iterations = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainingConfig::reference();
        cfg.gamma = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainingConfig::reference();
        cfg.clip_epsilon = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainingConfig::reference();
        cfg.learning_rate = -0.1;
        assert!(cfg.validate().is_err());
        // supertype count must match agents
        let mut env = bandit_env(vec![1.0, 0.0]);
        let types = [uniform_supertype(0.0), uniform_supertype(1.0)];
        assert!(train(&mut env, &types, &TrainingConfig::desk()).is_err());
        assert!(train(&mut env, &[], &TrainingConfig::desk()).is_err());
    }
}
