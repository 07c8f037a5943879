//! Twin-delayed deep deterministic policy gradient: replay buffer, twin
//! critics with clipped double-Q targets, target-policy smoothing and
//! delayed actor/target updates.

mod agent;
mod buffer;
mod train;

pub use agent::{compute_targets, Batch, Td3Agent, UpdateStats};
pub use buffer::{ReplayBuffer, Transition};
pub use train::{write_row, LogRow, Trainer, TrainingLog, TRAIN_LOG_HEADER};

use serde::{Deserialize, Serialize};

use crate::env::{EpisodeTrace, NavAction, NavEnv, NavState, TaskSpec};
use crate::neural::{Checkpoint, Mlp};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Td3Config {
    pub gamma: f64,
    pub tau: f64,
    pub policy_delay: usize,
    pub batch_size: usize,
    /// `σ_expl`, normalised action units.
    pub exploration_noise: f64,
    /// `σ_pol` for target-policy smoothing.
    pub policy_noise: f64,
    /// Clip `c` on the smoothing noise.
    pub noise_clip: f64,
    pub episodes: u64,
    /// Transitions collected with uniform random actions before updates.
    pub warmup_steps: usize,
    pub buffer_capacity: usize,
    pub hidden: Vec<usize>,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Sliding window for the training log averages.
    pub window: usize,
    /// Checkpoint every this many episodes; 0 only writes the final one.
    pub checkpoint_every: u64,
    /// `[lo, hi]` clip on rewards stored for learning; the log keeps raw
    /// returns.
    pub reward_clip: Option<[f64; 2]>,
}

impl Default for Td3Config {
    fn default() -> Self {
        Self {
            gamma: 0.995,
            tau: 0.005,
            policy_delay: 2,
            batch_size: 256,
            exploration_noise: 0.2,
            policy_noise: 0.1,
            noise_clip: 0.2,
            episodes: 20_000,
            warmup_steps: 1_000,
            buffer_capacity: 50_000,
            hidden: vec![512, 512, 512],
            actor_lr: 1e-3,
            critic_lr: 1e-3,
            window: 200,
            checkpoint_every: 0,
            reward_clip: None,
        }
    }
}

impl Td3Config {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            v.push(format!("td3.gamma = {} must be in (0, 1)", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            v.push(format!("td3.tau = {} must be in (0, 1]", self.tau));
        }
        if self.policy_delay == 0 {
            v.push("td3.policy_delay must be ≥ 1".into());
        }
        if self.batch_size == 0 {
            v.push("td3.batch_size must be ≥ 1".into());
        }
        if self.batch_size > self.buffer_capacity {
            v.push(format!(
                "td3.batch_size = {} exceeds buffer_capacity = {}",
                self.batch_size, self.buffer_capacity
            ));
        }
        for (name, x) in [
            ("exploration_noise", self.exploration_noise),
            ("policy_noise", self.policy_noise),
            ("noise_clip", self.noise_clip),
        ] {
            if !(x >= 0.0 && x.is_finite()) {
                v.push(format!("td3.{name} = {x} must be ≥ 0"));
            }
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            v.push(format!("td3.hidden = {:?} needs at least one non-empty layer", self.hidden));
        }
        for (name, x) in [("actor_lr", self.actor_lr), ("critic_lr", self.critic_lr)] {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("td3.{name} = {x} must be > 0"));
            }
        }
        if let Some([lo, hi]) = self.reward_clip {
            if !(lo < hi) {
                v.push(format!("td3.reward_clip = [{lo}, {hi}] must satisfy lo < hi"));
            }
        }
        if self.window == 0 {
            v.push("td3.window must be ≥ 1".into());
        }
        v
    }
}

/// Inference-only snapshot of a trained actor.
#[derive(Debug, Clone, PartialEq)]
pub struct Td3Policy {
    pub actor: Mlp,
}

impl Td3Policy {
    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        let actor = ck
            .network("actor")
            .cloned()
            .ok_or_else(|| Error::Checkpoint("checkpoint has no actor".into()))?;
        if actor.input_dim() != crate::env::STATE_DIM || actor.output_dim() != crate::env::ACTION_DIM
        {
            return Err(Error::Checkpoint("actor has the wrong input/output size".into()));
        }
        Ok(Self { actor })
    }

    /// Greedy action for `state` in `env`'s normalisation.
    pub fn act(&self, env: &NavEnv, state: &NavState) -> Result<NavAction> {
        let out = self.actor.predict_one(&env.normalized_state(state))?;
        Ok(NavAction::from_normalized([out[0], out[1]], env.max_distance()))
    }

    /// Greedy rollout of `task` until the episode ends.
    pub fn run_episode(&self, env: &mut NavEnv, task: TaskSpec) -> Result<EpisodeTrace> {
        let mut state = env.reset(task)?;
        loop {
            let out = env.step(self.act(env, &state)?)?;
            if out.done {
                break;
            }
            state = out.state;
        }
        Ok(env.take_trace().expect("episode was running"))
    }
}

#[cfg(test)]
mod tests;
