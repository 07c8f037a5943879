use std::collections::VecDeque;
use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::agent::{Batch, Td3Agent};
use super::buffer::{ReplayBuffer, Transition};
use super::{Td3Config, Td3Policy};
use crate::env::{NavAction, NavEnv};
use crate::eval::TaskDistribution;
use crate::neural::Checkpoint;
use crate::seed::{derive_seed, rng_for, rng_from_state, rng_state};
use crate::{Error, Result};

pub const TRAIN_LOG_HEADER: &str = "episode,steps,return,success,window_return,window_sr";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    /// 1-based, continues across resumes.
    pub episode: u64,
    pub steps: usize,
    pub ret: f64,
    pub success: bool,
    pub window_return: f64,
    pub window_sr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub rows: Vec<LogRow>,
    /// Episodes whose task could not be set up.
    pub skipped: u64,
}

impl TrainingLog {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TRAIN_LOG_HEADER}")?;
        for r in &self.rows {
            write_row(&mut out, r)?;
        }
        Ok(())
    }

    pub fn last_window_sr(&self) -> Option<f64> {
        self.rows.last().map(|r| r.window_sr)
    }
}

pub fn write_row<W: Write>(out: &mut W, r: &LogRow) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{}",
        r.episode,
        r.steps,
        r.ret,
        u8::from(r.success),
        r.window_return,
        r.window_sr
    )
}

/// Hash of everything that shapes a training run, stored in checkpoints
/// so a resume with different settings is refused. The episode budget and
/// checkpoint cadence are left out so a run can be extended.
pub fn config_hash(td3: &Td3Config, env: &NavEnv, tasks: &TaskDistribution) -> u64 {
    let td3 = Td3Config {
        episodes: 0,
        checkpoint_every: 0,
        ..td3.clone()
    };
    let text = format!(
        "{td3:?}|{:?}|{:?}|{:?}|{}",
        env.config(),
        env.region(),
        tasks,
        env.field().name()
    );
    let digest = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Sequential training loop: random tasks, exploration, replay and one
/// update per environment step once the buffer is warm.
#[derive(Debug)]
pub struct Trainer {
    agent: Td3Agent,
    buffer: ReplayBuffer,
    env: NavEnv,
    tasks: TaskDistribution,
    seed: u64,
    rng: ChaCha8Rng,
    task_rng: ChaCha8Rng,
    episodes_done: u64,
    total_steps: u64,
    window: VecDeque<(f64, bool)>,
    log: TrainingLog,
    config_hash: u64,
}

impl Trainer {
    pub fn new(env: NavEnv, config: &Td3Config, tasks: TaskDistribution, seed: u64) -> Result<Self> {
        let mut v = config.violations();
        v.extend(tasks.violations());
        if !v.is_empty() {
            return Err(Error::Config(v));
        }
        let agent = Td3Agent::new(config, &mut rng_for(seed, "td3/init"));
        Ok(Self {
            agent,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            config_hash: config_hash(config, &env, &tasks),
            env,
            tasks,
            seed,
            rng: rng_for(seed, "td3/noise"),
            task_rng: rng_for(seed, "td3/tasks"),
            episodes_done: 0,
            total_steps: 0,
            window: VecDeque::new(),
            log: TrainingLog::default(),
        })
    }

    /// Continues from a checkpoint written by [`checkpoint`](Self::checkpoint).
    /// The replay buffer is not stored, so it is refilled with warmup
    /// actions first.
    pub fn resume(
        env: NavEnv,
        config: &Td3Config,
        tasks: TaskDistribution,
        ck: &Checkpoint,
    ) -> Result<Self> {
        let mut t = Self::new(env, config, tasks, 0)?;
        if ck.config_hash != t.config_hash {
            return Err(Error::Checkpoint(
                "checkpoint was written with a different configuration".into(),
            ));
        }
        let counter = |name: &str| {
            ck.counter(name)
                .ok_or_else(|| Error::Checkpoint(format!("missing counter {name:?}")))
        };
        let rng = |name: &str| {
            ck.vector(name)
                .map(|v| v.iter().map(|x| x.to_bits()).collect::<Vec<u64>>())
                .and_then(|w| rng_from_state(&w))
                .ok_or_else(|| Error::Checkpoint(format!("missing generator state {name:?}")))
        };
        t.agent = Td3Agent::from_checkpoint(config, ck)?;
        t.seed = counter("seed")?;
        t.episodes_done = counter("episodes")?;
        t.total_steps = counter("total_steps")?;
        t.rng = rng("rng_noise")?;
        t.task_rng = rng("rng_tasks")?;
        let returns = ck.vector("window_returns").unwrap_or_default();
        let successes = ck.vector("window_success").unwrap_or_default();
        t.window = returns
            .iter()
            .zip(successes)
            .map(|(&r, &s)| (r, s > 0.5))
            .collect();
        Ok(t)
    }

    pub fn agent(&self) -> &Td3Agent {
        &self.agent
    }

    pub fn env(&self) -> &NavEnv {
        &self.env
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn log(&self) -> &TrainingLog {
        &self.log
    }

    pub fn episodes_done(&self) -> u64 {
        self.episodes_done
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn policy(&self) -> Td3Policy {
        Td3Policy {
            actor: self.agent.actor.clone(),
        }
    }

    pub fn into_parts(self) -> (Td3Agent, TrainingLog) {
        (self.agent, self.log)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let mut ck = Checkpoint {
            config_hash: self.config_hash,
            ..Default::default()
        };
        self.agent.write_checkpoint(&mut ck);
        ck.counters.extend([
            ("seed".to_string(), self.seed),
            ("episodes".to_string(), self.episodes_done),
            ("total_steps".to_string(), self.total_steps),
        ]);
        let bits = |w: Vec<u64>| w.into_iter().map(f64::from_bits).collect::<Vec<f64>>();
        let b = self.env.bounds();
        ck.vectors.extend([
            ("bounds_lo".to_string(), b.lo.to_vec()),
            ("bounds_hi".to_string(), b.hi.to_vec()),
            ("rng_noise".to_string(), bits(rng_state(&self.rng))),
            ("rng_tasks".to_string(), bits(rng_state(&self.task_rng))),
            (
                "window_returns".to_string(),
                self.window.iter().map(|w| w.0).collect(),
            ),
            (
                "window_success".to_string(),
                self.window.iter().map(|w| f64::from(u8::from(w.1))).collect(),
            ),
        ]);
        ck
    }

    /// Runs one episode. Returns `None` when the sampled task was rejected
    /// by the environment (the episode is skipped and counted).
    pub fn run_episode(&mut self) -> Result<Option<LogRow>> {
        let episode_no = self.episodes_done + 1;
        let task_seed = derive_seed(self.seed, &format!("train/{episode_no}"));
        let task = self.tasks.sample(self.env.region(), task_seed, &mut self.task_rng)?;
        let mut state = match self.env.reset(task) {
            Ok(s) => s,
            Err(e @ (Error::Task(_) | Error::DegenerateField(_) | Error::NonFinite(_))) => {
                log::warn!("episode {episode_no}: skipped ({e})");
                self.log.skipped += 1;
                self.episodes_done += 1;
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let cfg = self.agent.config().clone();
        let max_distance = self.env.max_distance();
        let mut ret = 0.0;
        let mut steps = 0;
        let success = loop {
            let u = self.env.normalized_state(&state);
            let a = if self.buffer.len() < cfg.warmup_steps {
                [
                    self.rng.random_range(-1.0..=1.0),
                    self.rng.random_range(-1.0..=1.0),
                ]
            } else {
                self.agent.select_action(&u, true, &mut self.rng)?
            };
            let out = self.env.step(NavAction::from_normalized(a, max_distance))?;
            let next = self.env.normalized_state(&out.state);
            self.buffer.push(Transition {
                state: u,
                action: a,
                reward: cfg.reward_clip.map_or(out.reward, |[lo, hi]| out.reward.clamp(lo, hi)),
                next_state: next,
                done: out.terminal,
                id: 0,
            });
            ret += out.reward;
            steps += 1;
            self.total_steps += 1;
            if self.buffer.len() >= cfg.warmup_steps.max(cfg.batch_size) {
                let batch = Batch::from_transitions(&self.buffer.sample(cfg.batch_size, &mut self.rng));
                self.agent.update(&batch, &mut self.rng)?;
            }
            state = out.state;
            if out.done {
                break out.info.success;
            }
        };
        self.env.take_trace();
        self.episodes_done = episode_no;
        self.window.push_back((ret, success));
        while self.window.len() > cfg.window {
            self.window.pop_front();
        }
        let n = self.window.len() as f64;
        let row = LogRow {
            episode: episode_no,
            steps,
            ret,
            success,
            window_return: self.window.iter().map(|w| w.0).sum::<f64>() / n,
            window_sr: self.window.iter().filter(|w| w.1).count() as f64 / n,
        };
        self.log.rows.push(row);
        Ok(Some(row))
    }

    /// Runs `episodes` more episodes, calling `after` after each one.
    pub fn run<F>(&mut self, episodes: u64, mut after: F) -> Result<()>
    where
        F: FnMut(&Trainer, Option<&LogRow>) -> Result<()>,
    {
        for _ in 0..episodes {
            let row = self.run_episode()?;
            after(self, row.as_ref())?;
        }
        Ok(())
    }
}
