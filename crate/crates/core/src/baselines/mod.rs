//! Step-wise metaheuristic navigators. At every vehicle step a population
//! of `(yaw, distance)` candidates is scored by probing the objective at
//! the position each candidate would reach, and the best one is executed.
//!
//! Candidates live in the unit square `[0, 1]²`: the first coordinate maps
//! to yaw in `[−π/2, π/2]`, the second to distance in `[0, L_max]`.

mod afsa;
mod ga;
mod pso;

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{EpisodeTrace, NavAction, NavEnv, TaskSpec};
use crate::{Error, Result};

pub use afsa::{afsa_search, AfsaConfig};
pub use ga::{ga_search, GaConfig};
pub use pso::{pso_search, PsoConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub yaw: f64,
    pub distance: f64,
    pub fitness: f64,
}

pub(crate) fn decode(u: [f64; 2], max_distance: f64) -> NavAction {
    NavAction::raw(
        u[1].clamp(0.0, 1.0) * max_distance,
        -PI / 2.0 + u[0].clamp(0.0, 1.0) * PI,
    )
}

/// Best-so-far fitness after initialisation (index 0) and after every
/// iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchLog {
    pub best: Vec<f64>,
    pub evaluations: usize,
}

impl SearchLog {
    pub fn is_monotone(&self) -> bool {
        self.best.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Objective probe wrapper counting evaluations.
pub(crate) struct Scorer<'a> {
    probe: &'a mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    evaluations: usize,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(probe: &'a mut dyn FnMut(&NavAction) -> Result<f64>, max_distance: f64) -> Self {
        Self {
            probe,
            max_distance,
            evaluations: 0,
        }
    }

    pub(crate) fn score(&mut self, u: [f64; 2]) -> Result<f64> {
        self.evaluations += 1;
        let f = (self.probe)(&decode(u, self.max_distance))?;
        Ok(if f.is_nan() { f64::INFINITY } else { f })
    }

    pub(crate) fn candidate(&self, u: [f64; 2], fitness: f64) -> Candidate {
        let a = decode(u, self.max_distance);
        Candidate {
            yaw: a.yaw,
            distance: a.distance,
            fitness,
        }
    }
}

pub(crate) fn random_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 2] {
    [rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)]
}

pub(crate) fn clamp_unit(u: [f64; 2]) -> [f64; 2] {
    u.map(|v| v.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub ga: GaConfig,
    pub pso: PsoConfig,
    pub afsa: AfsaConfig,
}

impl SearchConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.ga.violations();
        v.extend(self.pso.violations());
        v.extend(self.afsa.violations());
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ga,
    Pso,
    Afsa,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ga, Method::Pso, Method::Afsa];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ga => "ga",
            Method::Pso => "pso",
            Method::Afsa => "afsa",
        }
    }

    pub fn search<R: Rng + ?Sized>(
        self,
        probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
        max_distance: f64,
        config: &SearchConfig,
        rng: &mut R,
    ) -> Result<(Candidate, SearchLog)> {
        match self {
            Method::Ga => ga_search(probe, max_distance, &config.ga, rng),
            Method::Pso => pso_search(probe, max_distance, &config.pso, rng),
            Method::Afsa => afsa_search(probe, max_distance, &config.afsa, rng),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Method::Ga),
            "pso" => Ok(Method::Pso),
            "afsa" => Ok(Method::Afsa),
            other => Err(Error::Usage(format!("unknown baseline {other:?}"))),
        }
    }
}

/// Proposes the next action in `env`'s running episode.
pub fn propose_action<R: Rng + ?Sized>(
    method: Method,
    env: &NavEnv,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<(NavAction, SearchLog)> {
    let mut probe = |a: &NavAction| env.probe(a);
    let (best, log) = method.search(&mut probe, env.max_distance(), config, rng)?;
    Ok((NavAction::raw(best.distance, best.yaw), log))
}

pub fn propose_action_ga<R: Rng + ?Sized>(
    env: &NavEnv,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<(NavAction, SearchLog)> {
    propose_action(Method::Ga, env, config, rng)
}

pub fn propose_action_pso<R: Rng + ?Sized>(
    env: &NavEnv,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<(NavAction, SearchLog)> {
    propose_action(Method::Pso, env, config, rng)
}

pub fn propose_action_afsa<R: Rng + ?Sized>(
    env: &NavEnv,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<(NavAction, SearchLog)> {
    propose_action(Method::Afsa, env, config, rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineEpisode {
    pub trace: EpisodeTrace,
    /// One search log per executed step.
    pub searches: Vec<SearchLog>,
}

impl BaselineEpisode {
    pub fn all_searches_monotone(&self) -> bool {
        self.searches.iter().all(SearchLog::is_monotone)
    }
}

/// Propose/execute until success, timeout or leaving the region.
pub fn run_baseline_episode<R: Rng + ?Sized>(
    method: Method,
    task: TaskSpec,
    env: &mut NavEnv,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<BaselineEpisode> {
    env.reset(task)?;
    let mut searches = Vec::new();
    loop {
        let (action, log) = propose_action(method, env, config, rng)?;
        searches.push(log);
        if env.step(action)?.done {
            break;
        }
    }
    let trace = env.take_trace().expect("episode was running");
    Ok(BaselineEpisode { trace, searches })
}
