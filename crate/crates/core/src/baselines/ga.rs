use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{clamp_unit, random_point, Candidate, Scorer, SearchLog};
use crate::env::NavAction;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub iterations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Standard deviation of Gaussian mutation, unit-square units.
    pub mutation_scale: f64,
    pub tournament: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 30,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_scale: 0.1,
            tournament: 3,
        }
    }
}

impl GaConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.population == 0 {
            v.push("search.ga.population must be ≥ 1".into());
        }
        for (name, x) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&x) {
                v.push(format!("search.ga.{name} = {x} must be in [0, 1]"));
            }
        }
        if !(self.mutation_scale >= 0.0 && self.mutation_scale.is_finite()) {
            v.push(format!(
                "search.ga.mutation_scale = {} must be ≥ 0",
                self.mutation_scale
            ));
        }
        if self.tournament == 0 {
            v.push("search.ga.tournament must be ≥ 1".into());
        }
        v
    }
}

/// Tournament selection, arithmetic crossover, Gaussian mutation, with
/// the best individual carried over unchanged (elitism).
pub fn ga_search<R: Rng + ?Sized>(
    probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    config: &GaConfig,
    rng: &mut R,
) -> Result<(Candidate, SearchLog)> {
    let init: Vec<[f64; 2]> = (0..config.population.max(1)).map(|_| random_point(rng)).collect();
    ga_from(init, probe, max_distance, config, rng)
}

pub(crate) fn ga_from<R: Rng + ?Sized>(
    init: Vec<[f64; 2]>,
    probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    config: &GaConfig,
    rng: &mut R,
) -> Result<(Candidate, SearchLog)> {
    let mut scorer = Scorer::new(probe, max_distance);
    let size = init.len();
    let mut pop = Vec::with_capacity(size);
    for u in init {
        let f = scorer.score(u)?;
        pop.push((u, f));
    }
    let mut best = best_of(&pop);
    let mut log = SearchLog {
        best: vec![best.1],
        evaluations: 0,
    };
    let mutation = Normal::new(0.0, config.mutation_scale.max(1e-300)).expect("finite scale");
    let tournament = |pop: &[([f64; 2], f64)], rng: &mut R| {
        let mut pick = pop[rng.random_range(0..pop.len())];
        for _ in 1..config.tournament {
            let c = pop[rng.random_range(0..pop.len())];
            if c.1 < pick.1 {
                pick = c;
            }
        }
        pick.0
    };
    for _ in 0..config.iterations {
        let mut children = vec![best.0];
        while children.len() < size {
            let p1 = tournament(&pop, rng);
            let p2 = tournament(&pop, rng);
            let (mut c1, mut c2) = (p1, p2);
            if rng.random::<f64>() < config.crossover_rate {
                let a: f64 = rng.random();
                for k in 0..2 {
                    c1[k] = a * p1[k] + (1.0 - a) * p2[k];
                    c2[k] = (1.0 - a) * p1[k] + a * p2[k];
                }
            }
            for c in [&mut c1, &mut c2] {
                for g in c.iter_mut() {
                    if rng.random::<f64>() < config.mutation_rate {
                        *g += mutation.sample(rng);
                    }
                }
                *c = clamp_unit(*c);
            }
            children.push(c1);
            if children.len() < size {
                children.push(c2);
            }
        }
        let mut next = Vec::with_capacity(size);
        next.push(best);
        for &u in &children[1..] {
            let f = scorer.score(u)?;
            next.push((u, f));
        }
        pop = next;
        let b = best_of(&pop);
        if b.1 < best.1 {
            best = b;
        }
        log.best.push(best.1);
    }
    log.evaluations = scorer.evaluations;
    Ok((scorer.candidate(best.0, best.1), log))
}

fn best_of(pop: &[([f64; 2], f64)]) -> ([f64; 2], f64) {
    pop.iter()
        .copied()
        .fold(pop[0], |b, c| if c.1 < b.1 { c } else { b })
}
