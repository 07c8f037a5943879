//! Run configuration: one TOML document covering field, region, episode,
//! learner, searchers, task generation, output and master seed.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::baselines::SearchConfig;
use crate::env::{EnvConfig, NavEnv};
use crate::eval::TaskDistribution;
use crate::field::{parse_coefficients, CoefficientSet, FieldSource, LinearField};
use crate::geo::Region;
use crate::td3::Td3Config;
use crate::{Error, Result};

/// Environment variable overriding the coefficient file of any config.
pub const COEFFS_ENV_VAR: &str = "GEONAV_IGRF_COEFFS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Spherical-harmonic IGRF synthesis.
    #[default]
    Igrf,
    /// Uniform-gradient synthetic field anchored at the region centre.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldKind,
    /// IGRF coefficient file; the bundled IGRF-13 table when absent.
    pub coefficients: Option<PathBuf>,
    pub region: Region,
    pub epoch: f64,
    pub env: EnvConfig,
    pub td3: Td3Config,
    pub search: SearchConfig,
    pub tasks: TaskDistribution,
    /// Held-out tasks per benchmark.
    pub eval_tasks: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl RunConfig {
    /// Full-scale setting: IGRF over 10°S–0°N, 160°E–170°E, 50 km steps,
    /// 300–500 km tasks, 3×512 networks, 20 000 episodes.
    pub fn paper() -> Self {
        Self {
            field: FieldKind::Igrf,
            coefficients: None,
            region: Region::PAPER,
            epoch: 2020.0,
            env: EnvConfig::default(),
            td3: Td3Config {
                checkpoint_every: 1_000,
                ..Td3Config::default()
            },
            search: SearchConfig::default(),
            tasks: TaskDistribution::default(),
            eval_tasks: 100,
            output_dir: PathBuf::from("runs/paper"),
            seed: 0,
        }
    }

    /// Desk-scale setting: linear field over a 150 km square, 10 km steps,
    /// 40–80 km tasks, 2×64 networks, 2 000 episodes.
    pub fn desk() -> Self {
        let mut env = EnvConfig {
            max_distance_m: 10_000.0,
            success_radius_m: 2_000.0,
            ..EnvConfig::default()
        };
        env.reward.n_max = 50;
        Self {
            field: FieldKind::Linear,
            coefficients: None,
            region: Region::square(-5.0, 165.0, 150_000.0),
            epoch: 2020.0,
            env,
            td3: Td3Config {
                hidden: vec![64, 64],
                batch_size: 64,
                episodes: 2_000,
                checkpoint_every: 500,
                ..Td3Config::default()
            },
            search: SearchConfig::default(),
            tasks: TaskDistribution {
                min_separation_m: 40_000.0,
                max_separation_m: 80_000.0,
                epoch: 2020.0,
            },
            eval_tasks: 100,
            output_dir: PathBuf::from("runs/desk"),
            seed: 0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            other => Err(Error::Usage(format!(
                "unknown preset {other:?}; known: paper, desk"
            ))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serialises")
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg = Self::from_toml(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every violated constraint, one message per field.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if let Err(e) = self.region.validate() {
            v.push(format!("region: {e}"));
        }
        if !self.epoch.is_finite() {
            v.push("epoch must be finite".into());
        }
        v.extend(self.env.violations());
        v.extend(self.td3.violations());
        v.extend(self.search.violations());
        v.extend(self.tasks.violations());
        if self.eval_tasks == 0 {
            v.push("eval_tasks must be ≥ 1".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// Coefficient file after applying [`COEFFS_ENV_VAR`].
    pub fn coefficients_path(&self) -> Option<PathBuf> {
        match std::env::var_os(COEFFS_ENV_VAR) {
            Some(p) if !p.is_empty() => Some(PathBuf::from(p)),
            _ => self.coefficients.clone(),
        }
    }

    pub fn build_field(&self) -> Result<Arc<dyn FieldSource>> {
        Ok(match self.field {
            FieldKind::Linear => Arc::new(LinearField::desk(self.region.frame())),
            FieldKind::Igrf => match self.coefficients_path() {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    Arc::new(parse_coefficients(&text)?)
                }
                None => Arc::new(CoefficientSet::igrf13()),
            },
        })
    }

    /// Environment with state bounds sampled over the region.
    pub fn build_env(&self) -> Result<NavEnv> {
        NavEnv::with_sampled_bounds(self.build_field()?, self.region, self.env.clone(), self.epoch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_round_trip_through_toml() {
        for cfg in [RunConfig::paper(), RunConfig::desk()] {
            assert!(cfg.violations().is_empty(), "{:?}", cfg.violations());
            assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        }
    }

    #[test]
    fn partial_document_fills_defaults() {
        let cfg = RunConfig::from_toml("seed = 9\n[td3]\nepisodes = 10\n").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.td3.episodes, 10);
        assert_eq!(cfg.td3.gamma, 0.995);
        assert_eq!(cfg.region, Region::PAPER);
    }

    #[test]
    fn every_violation_is_listed() {
        let text = "[td3]\ngamma = 1.5\npolicy_delay = 0\n[env.reward]\nzeta3 = 20.0\n[tasks]\nmin_separation_m = -1.0\n";
        let cfg = RunConfig::from_toml(text).unwrap();
        let Err(Error::Config(v)) = cfg.validate() else {
            panic!("expected a config error");
        };
        for key in ["td3.gamma", "td3.policy_delay", "reward.zeta2", "tasks.min_separation_m"] {
            assert!(v.iter().any(|m| m.contains(key)), "{key} missing from {v:?}");
        }
    }

    #[test]
    fn preset_files_match_the_builtin_presets() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        for (file, cfg) in [("paper.toml", RunConfig::paper()), ("desk.toml", RunConfig::desk())] {
            assert_eq!(RunConfig::load(&root.join(file)).unwrap(), cfg, "{file}");
        }
        assert!(matches!(RunConfig::preset("lab"), Err(Error::Usage(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("sede = 3\n").is_err());
    }
}
