use ndarray::{concatenate, s, Array1, Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::buffer::Transition;
use super::Td3Config;
use crate::env::{ACTION_DIM, STATE_DIM};
use crate::neural::{soft_update, Activation, Adam, Checkpoint, Mlp};
use crate::{Error, Result};

/// A mini-batch laid out as matrices.
#[derive(Debug, Clone)]
pub struct Batch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub next_states: Array2<f64>,
    pub dones: Array1<f64>,
}

impl Batch {
    pub fn from_transitions(ts: &[Transition]) -> Self {
        let n = ts.len();
        let mut states = Array2::zeros((n, STATE_DIM));
        let mut next_states = Array2::zeros((n, STATE_DIM));
        let mut actions = Array2::zeros((n, ACTION_DIM));
        for (i, t) in ts.iter().enumerate() {
            for k in 0..STATE_DIM {
                states[[i, k]] = t.state[k];
                next_states[[i, k]] = t.next_state[k];
            }
            for k in 0..ACTION_DIM {
                actions[[i, k]] = t.action[k];
            }
        }
        Self {
            states,
            actions,
            rewards: ts.iter().map(|t| t.reward).collect(),
            next_states,
            dones: ts.iter().map(|t| f64::from(u8::from(t.done))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// `y = r + γ (1 − d) min(Q1', Q2')`.
pub fn compute_targets(
    q1: &Array1<f64>,
    q2: &Array1<f64>,
    rewards: &Array1<f64>,
    dones: &Array1<f64>,
    gamma: f64,
) -> Array1<f64> {
    let mut y = rewards.clone();
    for i in 0..y.len() {
        y[i] += gamma * (1.0 - dones[i]) * q1[i].min(q2[i]);
    }
    y
}

fn critic_input(states: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
    concatenate(Axis(1), &[states.view(), actions.view()]).expect("batch rows agree")
}

fn q_values(critic: &Mlp, states: &Array2<f64>, actions: &Array2<f64>) -> Result<Array1<f64>> {
    Ok(critic
        .predict(&critic_input(states, actions))?
        .index_axis_move(Axis(1), 0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub critic_loss: [f64; 2],
    /// Batch-mean `Q1(s, π(s))` before the actor step, when one happened.
    pub actor_objective: Option<f64>,
}

/// Actor, twin critics and their targets with optimiser state.
#[derive(Debug, Clone, PartialEq)]
pub struct Td3Agent {
    pub actor: Mlp,
    pub actor_target: Mlp,
    pub critics: [Mlp; 2],
    pub critic_targets: [Mlp; 2],
    actor_opt: Adam,
    critic_opts: [Adam; 2],
    config: Td3Config,
    update_count: u64,
    actor_updates: u64,
}

impl Td3Agent {
    pub fn new<R: Rng + ?Sized>(config: &Td3Config, rng: &mut R) -> Self {
        let mut actor_sizes = vec![STATE_DIM];
        actor_sizes.extend(&config.hidden);
        actor_sizes.push(ACTION_DIM);
        let mut critic_sizes = vec![STATE_DIM + ACTION_DIM];
        critic_sizes.extend(&config.hidden);
        critic_sizes.push(1);
        let actor = Mlp::new(&actor_sizes, Activation::Relu, Activation::Tanh, rng);
        let c1 = Mlp::new(&critic_sizes, Activation::Relu, Activation::Identity, rng);
        let c2 = Mlp::new(&critic_sizes, Activation::Relu, Activation::Identity, rng);
        Self {
            actor_opt: Adam::new(&actor, config.actor_lr),
            critic_opts: [Adam::new(&c1, config.critic_lr), Adam::new(&c2, config.critic_lr)],
            actor_target: actor.clone(),
            critic_targets: [c1.clone(), c2.clone()],
            actor,
            critics: [c1, c2],
            config: config.clone(),
            update_count: 0,
            actor_updates: 0,
        }
    }

    pub fn config(&self) -> &Td3Config {
        &self.config
    }

    /// Critic updates performed so far.
    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn actor_updates(&self) -> u64 {
        self.actor_updates
    }

    /// Normalised action in `[-1, 1]²`; with `explore`, Gaussian noise of
    /// scale `σ_expl` is added before clipping.
    pub fn select_action<R: Rng + ?Sized>(
        &self,
        state: &[f64; STATE_DIM],
        explore: bool,
        rng: &mut R,
    ) -> Result<[f64; ACTION_DIM]> {
        let out = self.actor.predict_one(state)?;
        let mut a = [out[0], out[1]];
        if explore && self.config.exploration_noise > 0.0 {
            let n = Normal::new(0.0, self.config.exploration_noise)
                .map_err(|e| Error::Config(vec![e.to_string()]))?;
            for v in &mut a {
                *v += n.sample(rng);
            }
        }
        Ok(a.map(|v| v.clamp(-1.0, 1.0)))
    }

    /// Smoothed target action `clip(π'(s') + clip(ε, −c, c), −1, 1)`.
    pub fn target_action<R: Rng + ?Sized>(
        &self,
        next_states: &Array2<f64>,
        rng: &mut R,
    ) -> Result<Array2<f64>> {
        let mut a = self.actor_target.predict(next_states)?;
        let sigma = self.config.policy_noise;
        if sigma > 0.0 {
            let n = Normal::new(0.0, sigma).map_err(|e| Error::Config(vec![e.to_string()]))?;
            let c = self.config.noise_clip;
            a.mapv_inplace(|v| v + n.sample(rng).clamp(-c, c));
        }
        a.mapv_inplace(|v| v.clamp(-1.0, 1.0));
        Ok(a)
    }

    /// Clipped double-Q targets for a batch.
    pub fn targets<R: Rng + ?Sized>(&self, batch: &Batch, rng: &mut R) -> Result<Array1<f64>> {
        let a2 = self.target_action(&batch.next_states, rng)?;
        let q1 = q_values(&self.critic_targets[0], &batch.next_states, &a2)?;
        let q2 = q_values(&self.critic_targets[1], &batch.next_states, &a2)?;
        Ok(compute_targets(&q1, &q2, &batch.rewards, &batch.dones, self.config.gamma))
    }

    /// One Adam step on the mean-squared error of each critic. Returns the
    /// pre-update losses.
    pub fn critic_update(&mut self, batch: &Batch, targets: &Array1<f64>) -> Result<[f64; 2]> {
        let n = batch.len() as f64;
        let x = critic_input(&batch.states, &batch.actions);
        let mut losses = [0.0; 2];
        for k in 0..2 {
            let (q, cache) = self.critics[k].forward(&x)?;
            let err = &q.column(0) - targets;
            let loss = err.mapv(|e| e * e).sum() / n;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "critic {} loss {loss} after {} updates",
                    k + 1,
                    self.update_count
                )));
            }
            let grad = err.mapv(|e| 2.0 * e / n).insert_axis(Axis(1));
            let (g, _) = self.critics[k].backward(&cache, &grad)?;
            self.critic_opts[k].apply(&mut self.critics[k], &g)?;
            losses[k] = loss;
        }
        Ok(losses)
    }

    /// Deterministic policy gradient step ascending the batch mean of
    /// `Q1(s, π(s))`. Returns that mean before the step.
    pub fn actor_update(&mut self, batch: &Batch) -> Result<f64> {
        let n = batch.len() as f64;
        let (a, actor_cache) = self.actor.forward(&batch.states)?;
        let (q, critic_cache) = self.critics[0].forward(&critic_input(&batch.states, &a))?;
        let objective = q.mean().unwrap_or(0.0);
        let dq = Array2::from_elem((batch.len(), 1), -1.0 / n);
        let (_, dx) = self.critics[0].backward(&critic_cache, &dq)?;
        let da = dx.slice(s![.., STATE_DIM..]).to_owned();
        let (g, _) = self.actor.backward(&actor_cache, &da)?;
        if !g.all_finite() {
            return Err(Error::NonFinite(format!(
                "actor gradient after {} updates",
                self.update_count
            )));
        }
        self.actor_opt.apply(&mut self.actor, &g)?;
        self.actor_updates += 1;
        Ok(objective)
    }

    pub fn soft_update_targets(&mut self) -> Result<()> {
        let tau = self.config.tau;
        soft_update(&mut self.actor_target, &self.actor, tau)?;
        for k in 0..2 {
            soft_update(&mut self.critic_targets[k], &self.critics[k], tau)?;
        }
        Ok(())
    }

    /// One training iteration: critic step on every call; actor step and
    /// target blending when the update counter is a multiple of the
    /// policy delay.
    pub fn update<R: Rng + ?Sized>(&mut self, batch: &Batch, rng: &mut R) -> Result<UpdateStats> {
        let y = self.targets(batch, rng)?;
        let critic_loss = self.critic_update(batch, &y)?;
        self.update_count += 1;
        let mut actor_objective = None;
        if self.update_count % self.config.policy_delay as u64 == 0 {
            actor_objective = Some(self.actor_update(batch)?);
            self.soft_update_targets()?;
        }
        Ok(UpdateStats {
            critic_loss,
            actor_objective,
        })
    }

    pub(crate) fn write_checkpoint(&self, ck: &mut Checkpoint) {
        ck.networks.extend([
            ("actor".to_string(), self.actor.clone()),
            ("actor_target".to_string(), self.actor_target.clone()),
            ("critic1".to_string(), self.critics[0].clone()),
            ("critic2".to_string(), self.critics[1].clone()),
            ("critic1_target".to_string(), self.critic_targets[0].clone()),
            ("critic2_target".to_string(), self.critic_targets[1].clone()),
        ]);
        ck.optimizers.extend([
            ("actor".to_string(), self.actor_opt.clone()),
            ("critic1".to_string(), self.critic_opts[0].clone()),
            ("critic2".to_string(), self.critic_opts[1].clone()),
        ]);
        ck.counters.extend([
            ("update_count".to_string(), self.update_count),
            ("actor_updates".to_string(), self.actor_updates),
        ]);
    }

    pub(crate) fn from_checkpoint(config: &Td3Config, ck: &Checkpoint) -> Result<Self> {
        let net = |name: &str| {
            ck.network(name)
                .cloned()
                .ok_or_else(|| Error::Checkpoint(format!("missing network {name:?}")))
        };
        let opt = |name: &str| {
            ck.optimizer(name)
                .cloned()
                .ok_or_else(|| Error::Checkpoint(format!("missing optimiser {name:?}")))
        };
        let actor = net("actor")?;
        if actor.input_dim() != STATE_DIM || actor.output_dim() != ACTION_DIM {
            return Err(Error::Checkpoint("actor has the wrong input/output size".into()));
        }
        Ok(Self {
            actor,
            actor_target: net("actor_target")?,
            critics: [net("critic1")?, net("critic2")?],
            critic_targets: [net("critic1_target")?, net("critic2_target")?],
            actor_opt: opt("actor")?,
            critic_opts: [opt("critic1")?, opt("critic2")?],
            config: config.clone(),
            update_count: ck.counter("update_count").unwrap_or(0),
            actor_updates: ck.counter("actor_updates").unwrap_or(0),
        })
    }
}
