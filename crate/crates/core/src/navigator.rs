//! Every navigation method behind one trait, created by name from a
//! registry of factories.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand_chacha::ChaCha8Rng;

use crate::baselines::{run_baseline_episode, Method, SearchConfig};
use crate::env::{EpisodeTrace, NavEnv, TaskSpec};
use crate::neural::Checkpoint;
use crate::td3::Td3Policy;
use crate::{Error, Result};

/// Drives one episode of `task` in `env` and returns its trace.
pub trait Navigator: Send + Sync {
    fn name(&self) -> &str;

    fn run_episode(&self, env: &mut NavEnv, task: TaskSpec, rng: &mut ChaCha8Rng) -> Result<EpisodeTrace>;
}

pub struct Td3Navigator {
    name: String,
    policy: Td3Policy,
}

impl Td3Navigator {
    pub fn new(name: impl Into<String>, policy: Td3Policy) -> Self {
        Self {
            name: name.into(),
            policy,
        }
    }
}

impl Navigator for Td3Navigator {
    fn name(&self) -> &str {
        &self.name
    }

    fn run_episode(&self, env: &mut NavEnv, task: TaskSpec, _rng: &mut ChaCha8Rng) -> Result<EpisodeTrace> {
        self.policy.run_episode(env, task)
    }
}

pub struct SearchNavigator {
    method: Method,
    config: SearchConfig,
}

impl SearchNavigator {
    pub fn new(method: Method, config: SearchConfig) -> Self {
        Self { method, config }
    }
}

impl Navigator for SearchNavigator {
    fn name(&self) -> &str {
        self.method.name()
    }

    fn run_episode(&self, env: &mut NavEnv, task: TaskSpec, rng: &mut ChaCha8Rng) -> Result<EpisodeTrace> {
        Ok(run_baseline_episode(self.method, task, env, &self.config, rng)?.trace)
    }
}

/// What factories may draw on.
#[derive(Debug, Clone, Default)]
pub struct NavigatorContext {
    pub search: SearchConfig,
    /// Checkpoint file per learned method name.
    pub checkpoints: BTreeMap<String, PathBuf>,
}

pub type Factory = fn(name: &str, ctx: &NavigatorContext) -> Result<Box<dyn Navigator>>;

fn td3_factory(name: &str, ctx: &NavigatorContext) -> Result<Box<dyn Navigator>> {
    let path = ctx
        .checkpoints
        .get(name)
        .ok_or_else(|| Error::Checkpoint(format!("no checkpoint configured for {name}")))?;
    if !path.exists() {
        return Err(Error::Checkpoint(format!(
            "checkpoint for {name} not found at {}",
            path.display()
        )));
    }
    let policy = Td3Policy::from_checkpoint(&Checkpoint::load(path)?)?;
    Ok(Box::new(Td3Navigator::new(name, policy)))
}

fn search_factory(name: &str, ctx: &NavigatorContext) -> Result<Box<dyn Navigator>> {
    Ok(Box::new(SearchNavigator::new(name.parse()?, ctx.search.clone())))
}

pub struct NavigatorRegistry {
    factories: BTreeMap<String, Factory>,
}

/// Methods that could not be built, with the reason.
pub type Skipped = Vec<(String, String)>;

impl NavigatorRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// `gg-td3` and `td3` (learned, need checkpoints) plus `ga`, `pso`
    /// and `afsa`.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("gg-td3", td3_factory);
        r.register("td3", td3_factory);
        for m in Method::ALL {
            r.register(m.name(), search_factory);
        }
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn create(&self, name: &str, ctx: &NavigatorContext) -> Result<Box<dyn Navigator>> {
        let factory = self.factories.get(name).ok_or_else(|| {
            Error::Usage(format!(
                "unknown method {name:?}; known: {}",
                self.names().join(", ")
            ))
        })?;
        factory(name, ctx)
    }

    /// Builds `names` in order. Unknown names fail the whole call; methods
    /// whose checkpoint is missing or unreadable are skipped with a
    /// warning.
    pub fn create_many(
        &self,
        names: &[String],
        ctx: &NavigatorContext,
    ) -> Result<(Vec<Box<dyn Navigator>>, Skipped)> {
        if let Some(bad) = names.iter().find(|n| !self.factories.contains_key(n.as_str())) {
            return Err(Error::Usage(format!(
                "unknown method {bad:?}; known: {}",
                self.names().join(", ")
            )));
        }
        let mut built = Vec::new();
        let mut skipped = Vec::new();
        for n in names {
            match self.create(n, ctx) {
                Ok(nav) => built.push(nav),
                Err(e @ (Error::Checkpoint(_) | Error::Io { .. })) => {
                    log::warn!("skipping {n}: {e}");
                    skipped.push((n.clone(), e.to_string()));
                }
                Err(e) => return Err(e),
            }
        }
        Ok((built, skipped))
    }
}

impl Default for NavigatorRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
