//! JSON map files: a layout plus optional overrides of speeds, noise and
//! reward constants.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::map::{EnvMap, RegionKind};
use crate::pomdp::{ModelSuite, PomdpSpec};

use super::floor::{FloorConfig, FloorEnv};
use super::lightdark::{LightDarkConfig, LightDarkEnv};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseOverrides {
    pub radar_std: Option<f64>,
    pub light_std: Option<f64>,
    pub dark_std: Option<f64>,
    pub proposer_light_std: Option<f64>,
    pub proposer_dark_std: Option<f64>,
    pub test_dark_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvFile {
    #[serde(flatten)]
    pub map: EnvMap,
    #[serde(default)]
    pub speed: Option<f64>,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub discount: Option<f64>,
    #[serde(default)]
    pub goal_reward: Option<f64>,
    #[serde(default)]
    pub trap_penalty: Option<f64>,
    #[serde(default)]
    pub noise: NoiseOverrides,
}

impl EnvFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn apply_spec(&self, mut spec: PomdpSpec) -> PomdpSpec {
        if let Some(r) = self.goal_reward {
            spec.goal_reward = r;
        }
        if let Some(p) = self.trap_penalty {
            spec.trap_penalty = p;
        }
        spec
    }

    pub fn floor_env(&self, mut cfg: FloorConfig) -> Result<FloorEnv, ConfigError> {
        cfg.speed = self.speed.unwrap_or(cfg.speed);
        cfg.max_steps = self.max_steps.unwrap_or(cfg.max_steps);
        cfg.discount = self.discount.unwrap_or(cfg.discount);
        cfg.obs_noise_std = self.noise.radar_std.unwrap_or(cfg.obs_noise_std);
        let env = FloorEnv::with_map(cfg, self.map.clone())?;
        let spec = self.apply_spec(env.spec().clone());
        env.with_spec(spec)
    }

    /// The light region, goal and start of `cfg` are replaced by the file's.
    pub fn lightdark_env(&self, mut cfg: LightDarkConfig) -> Result<LightDarkEnv, ConfigError> {
        cfg.speed = self.speed.unwrap_or(cfg.speed);
        cfg.max_steps = self.max_steps.unwrap_or(cfg.max_steps);
        cfg.discount = self.discount.unwrap_or(cfg.discount);
        let n = &self.noise;
        cfg.light_std = n.light_std.unwrap_or(cfg.light_std);
        cfg.dark_std = n.dark_std.unwrap_or(cfg.dark_std);
        cfg.proposer_light_std = n.proposer_light_std.unwrap_or(cfg.proposer_light_std);
        cfg.proposer_dark_std = n.proposer_dark_std.unwrap_or(cfg.proposer_dark_std);
        cfg.test_dark_std = n.test_dark_std.unwrap_or(cfg.test_dark_std);
        cfg.bounds = self.map.bounds;
        if let Some(goal) = self.map.regions_of(RegionKind::Goal).next() {
            cfg.goal = goal.rect;
        }
        if let Some(start) = self.map.regions_of(RegionKind::Start).next() {
            cfg.start = start.rect;
        }
        cfg.fixed_traps = self.map.regions_of(RegionKind::Trap).map(|r| r.rect).collect();
        let env = LightDarkEnv::with_map(cfg, self.map.clone())?;
        let spec = self.apply_spec(env.spec().clone());
        env.with_spec(spec)
    }
}
