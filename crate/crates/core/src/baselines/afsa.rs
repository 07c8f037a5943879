use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_unit, random_point, Candidate, Scorer, SearchLog};
use crate::env::NavAction;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AfsaConfig {
    pub population: usize,
    pub iterations: usize,
    /// Visual range, unit-square units (1/6 of the yaw span is π/6).
    pub visual: f64,
    /// Maximum move per behaviour, unit-square units.
    pub step: f64,
    /// Crowding factor δ: a neighbourhood holding at least δ·N fish is
    /// too crowded to swarm into or follow.
    pub crowding: f64,
    pub try_number: usize,
}

impl Default for AfsaConfig {
    fn default() -> Self {
        Self {
            population: 30,
            iterations: 30,
            visual: 1.0 / 6.0,
            step: 1.0 / 12.0,
            crowding: 0.618,
            try_number: 5,
        }
    }
}

impl AfsaConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.population == 0 {
            v.push("search.afsa.population must be ≥ 1".into());
        }
        if !(self.visual > 0.0) {
            v.push(format!("search.afsa.visual = {} must be > 0", self.visual));
        }
        if !(self.step > 0.0) {
            v.push(format!("search.afsa.step = {} must be > 0", self.step));
        }
        if !(self.crowding > 0.0 && self.crowding <= 1.0) {
            v.push(format!(
                "search.afsa.crowding = {} must be in (0, 1]",
                self.crowding
            ));
        }
        if self.try_number == 0 {
            v.push("search.afsa.try_number must be ≥ 1".into());
        }
        v
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn toward<R: Rng + ?Sized>(from: [f64; 2], to: [f64; 2], step: f64, rng: &mut R) -> [f64; 2] {
    let d = dist(from, to);
    if d == 0.0 {
        return from;
    }
    let s = step * rng.random::<f64>() / d;
    clamp_unit([from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])])
}

/// Artificial fish swarm: each fish tries swarming and following, keeps
/// the better move if it improves, otherwise preys (random probing within
/// the visual range, falling back to a random step). A bulletin board
/// keeps the best fish ever seen.
pub fn afsa_search<R: Rng + ?Sized>(
    probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    config: &AfsaConfig,
    rng: &mut R,
) -> Result<(Candidate, SearchLog)> {
    let init: Vec<[f64; 2]> = (0..config.population.max(1)).map(|_| random_point(rng)).collect();
    afsa_from(init, probe, max_distance, config, rng)
}

pub(crate) fn afsa_from<R: Rng + ?Sized>(
    init: Vec<[f64; 2]>,
    probe: &mut dyn FnMut(&NavAction) -> Result<f64>,
    max_distance: f64,
    config: &AfsaConfig,
    rng: &mut R,
) -> Result<(Candidate, SearchLog)> {
    let mut scorer = Scorer::new(probe, max_distance);
    let mut fish = Vec::with_capacity(init.len());
    for u in init {
        fish.push((u, scorer.score(u)?));
    }
    let n = fish.len();
    let mut board = fish
        .iter()
        .copied()
        .fold(fish[0], |b, c| if c.1 < b.1 { c } else { b });
    let mut log = SearchLog {
        best: vec![board.1],
        evaluations: 0,
    };
    let (visual, step) = (config.visual, config.step);
    for _ in 0..config.iterations {
        for i in 0..n {
            let (xi, fi) = fish[i];
            let neighbours: Vec<usize> = (0..n)
                .filter(|&j| j != i && dist(fish[j].0, xi) <= visual)
                .collect();
            let nf = neighbours.len();
            let roomy = (nf as f64) < config.crowding * n as f64;
            let mut moves: Vec<([f64; 2], f64)> = Vec::new();
            if nf > 0 && roomy {
                // Swarm toward the neighbourhood centre.
                let mut c = [0.0; 2];
                for &j in &neighbours {
                    c[0] += fish[j].0[0] / nf as f64;
                    c[1] += fish[j].0[1] / nf as f64;
                }
                if scorer.score(c)? < fi {
                    let m = toward(xi, c, step, rng);
                    moves.push((m, scorer.score(m)?));
                }
                // Follow the best neighbour.
                let &jb = neighbours
                    .iter()
                    .min_by(|&&a, &&b| fish[a].1.total_cmp(&fish[b].1))
                    .expect("non-empty");
                if fish[jb].1 < fi {
                    let m = toward(xi, fish[jb].0, step, rng);
                    moves.push((m, scorer.score(m)?));
                }
            }
            let improving = moves
                .into_iter()
                .filter(|m| m.1 < fi)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            fish[i] = match improving {
                Some(m) => m,
                None => prey(xi, fi, &mut scorer, config, rng)?,
            };
            if fish[i].1 < board.1 {
                board = fish[i];
            }
        }
        log.best.push(board.1);
    }
    log.evaluations = scorer.evaluations;
    Ok((scorer.candidate(board.0, board.1), log))
}

fn prey<R: Rng + ?Sized>(
    xi: [f64; 2],
    fi: f64,
    scorer: &mut Scorer<'_>,
    config: &AfsaConfig,
    rng: &mut R,
) -> Result<([f64; 2], f64)> {
    let visual = config.visual;
    for _ in 0..config.try_number {
        let xj = clamp_unit([
            xi[0] + visual * rng.random_range(-1.0..=1.0),
            xi[1] + visual * rng.random_range(-1.0..=1.0),
        ]);
        if scorer.score(xj)? < fi {
            let m = toward(xi, xj, config.step, rng);
            return Ok((m, scorer.score(m)?));
        }
    }
    let m = clamp_unit([
        xi[0] + config.step * rng.random_range(-1.0..=1.0),
        xi[1] + config.step * rng.random_range(-1.0..=1.0),
    ]);
    Ok((m, scorer.score(m)?))
}
