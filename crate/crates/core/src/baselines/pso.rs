use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_unit, random_point, Candidate, Scorer, SearchLog};
use crate::env::NavAction;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub population: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Per-coordinate velocity limit, unit-square units.
    pub velocity_clamp: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            population: 30,
            iterations: 50,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            velocity_clamp: 0.2,
        }
    }
}

impl PsoConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.population == 0 {
            v.push("search.pso.population must be ≥ 1".into());
        }
        for (name, x) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
        ] {
            if !(x >= 0.0 && x.is_finite()) {
                v.push(format!("search.pso.{name} = {x} must be ≥ 0"));
            }
        }
        if !(self.velocity_clamp > 0.0) {
            v.push(format!(
                "search.pso.velocity_clamp = {} must be > 0",
                self.velocity_clamp
            ));
        }
        v
    }
}

/// Global-best PSO with personal bests and clamped velocities, starting
/// from rest.
pub fn pso_search<R: Rng + ?Sized>(
    probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    config: &PsoConfig,
    rng: &mut R,
) -> Result<(Candidate, SearchLog)> {
    let init: Vec<[f64; 2]> = (0..config.population.max(1)).map(|_| random_point(rng)).collect();
    pso_from(init, probe, max_distance, config, rng)
}

pub(crate) fn pso_from<R: Rng + ?Sized>(
    init: Vec<[f64; 2]>,
    probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    config: &PsoConfig,
    rng: &mut R,
) -> Result<(Candidate, SearchLog)> {
    let mut scorer = Scorer::new(probe, max_distance);
    let mut x = init;
    let mut v = vec![[0.0; 2]; x.len()];
    let mut pbest = Vec::with_capacity(x.len());
    for &u in &x {
        pbest.push((u, scorer.score(u)?));
    }
    let mut gbest = pbest
        .iter()
        .copied()
        .fold(pbest[0], |b, c| if c.1 < b.1 { c } else { b });
    let mut log = SearchLog {
        best: vec![gbest.1],
        evaluations: 0,
    };
    let vmax = config.velocity_clamp;
    for _ in 0..config.iterations {
        for i in 0..x.len() {
            for k in 0..2 {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                v[i][k] = (config.inertia * v[i][k]
                    + config.cognitive * r1 * (pbest[i].0[k] - x[i][k])
                    + config.social * r2 * (gbest.0[k] - x[i][k]))
                    .clamp(-vmax, vmax);
            }
            x[i] = clamp_unit([x[i][0] + v[i][0], x[i][1] + v[i][1]]);
            let f = scorer.score(x[i])?;
            if f < pbest[i].1 {
                pbest[i] = (x[i], f);
            }
            if f < gbest.1 {
                gbest = (x[i], f);
            }
        }
        log.best.push(gbest.1);
    }
    log.evaluations = scorer.evaluations;
    Ok((scorer.candidate(gbest.0, gbest.1), log))
}
