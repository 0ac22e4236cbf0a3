//! Trained-policy persistence.
//!
//! A checkpoint is a single JSON file carrying the policy and value
//! parameters together with everything needed to rebuild the run: the
//! environment config, the supertypes, the layer sizes, and the seed.
//! JSON numbers are written in shortest-round-trip form, so parameters
//! survive save and load bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core::Supertype;
use crate::envs::EnvConfig;
use crate::error::{Error, Result};
use crate::learner::{check_supertypes, TrainingOutput};
use crate::policy::{observation_len, Mlp, Policy, HIDDEN};

pub const CHECKPOINT_FORMAT: &str = "bounded-agents-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub env: EnvConfig,
    pub supertypes: Vec<Supertype>,
    pub hidden: Vec<usize>,
    pub obs_len: usize,
    pub n_actions: usize,
    pub policy_params: Vec<f64>,
    pub value_params: Vec<f64>,
}

impl Checkpoint {
    pub fn from_training(
        env: EnvConfig,
        supertypes: Vec<Supertype>,
        seed: u64,
        output: &TrainingOutput,
    ) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            seed,
            env,
            supertypes,
            hidden: HIDDEN.to_vec(),
            obs_len: output.policy.obs_len(),
            n_actions: output.policy.n_actions(),
            policy_params: output.policy.net().params().to_vec(),
            value_params: output.value.params().to_vec(),
        }
    }

    fn policy_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.obs_len];
        sizes.extend_from_slice(&self.hidden);
        sizes.push(self.n_actions);
        sizes
    }

    fn value_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.obs_len];
        sizes.extend_from_slice(&self.hidden);
        sizes.push(1);
        sizes
    }

    /// Checks internal consistency and agreement with the embedded
    /// environment config.
    pub fn validate(&self) -> Result<()> {
        if self.format != CHECKPOINT_FORMAT {
            return Err(Error::data(format!(
                "not a checkpoint file (format field is {:?})",
                self.format
            )));
        }
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::data(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                self.version
            )));
        }
        let env = self.env.build()?;
        check_supertypes(&self.supertypes, env.num_agents())?;
        for supertype in &self.supertypes {
            supertype.validate()?;
        }
        if self.n_actions != env.action_space().len() {
            return Err(Error::Dimension(format!(
                "checkpoint has {} actions but the environment grid has {}",
                self.n_actions,
                env.action_space().len()
            )));
        }
        let expected_obs = observation_len(env.env_feature_len(), self.n_actions);
        if self.obs_len != expected_obs {
            return Err(Error::Dimension(format!(
                "checkpoint observation length {} does not match the environment's {}",
                self.obs_len, expected_obs
            )));
        }
        let want_policy = Mlp::param_count(&self.policy_sizes());
        if self.policy_params.len() != want_policy {
            return Err(Error::Dimension(format!(
                "policy parameter vector has {} entries, layer sizes require {}",
                self.policy_params.len(),
                want_policy
            )));
        }
        let want_value = Mlp::param_count(&self.value_sizes());
        if self.value_params.len() != want_value {
            return Err(Error::Dimension(format!(
                "value parameter vector has {} entries, layer sizes require {}",
                self.value_params.len(),
                want_value
            )));
        }
        Ok(())
    }

    pub fn policy(&self) -> Result<Policy> {
        let net = Mlp::from_params(&self.policy_sizes(), self.policy_params.clone())?;
        Ok(Policy::from_net(net))
    }

    pub fn value(&self) -> Result<Mlp> {
        Mlp::from_params(&self.value_sizes(), self.value_params.clone())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        fs::write(path, body)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = fs::read_to_string(path)
            .map_err(|e| Error::data(format!("checkpoint {}: {e}", path.display())))?;
        let ckpt: Checkpoint = serde_json::from_str(&body)
            .map_err(|e| Error::data(format!("checkpoint {}: {e}", path.display())))?;
        ckpt.validate()?;
        Ok(ckpt)
    }
}
