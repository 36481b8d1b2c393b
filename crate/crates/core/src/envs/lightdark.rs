//! 2D Light-Dark navigation.
//!
//! Observations are the true position plus isotropic Gaussian noise whose
//! standard deviation depends on the region: small in the light strip on the
//! right, large everywhere else.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{positive, ConfigError};
use crate::geometry::{Rect, StateVec};
use crate::map::{EnvMap, Region, RegionKind};
use crate::pomdp::{ActionId, ModelSuite, PomdpSpec, Terminal};
use crate::rng::SimRng;

use super::{gaussian, nav_reward, nav_transition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LightDarkConfig {
    pub speed: f64,
    pub light_std: f64,
    pub dark_std: f64,
    pub proposer_light_std: f64,
    pub proposer_dark_std: f64,
    pub bounds: Rect,
    pub light: Rect,
    pub start: Rect,
    pub goal: Rect,
    /// Traps present in every episode.
    pub fixed_traps: Vec<Rect>,
    /// Side length of the randomly placed test-time traps.
    pub trap_size: f64,
    pub trap_count: usize,
    /// Strip the random traps are drawn in.
    pub trap_strip: Rect,
    /// Dark-region noise the world uses in the mismatch ablation.
    pub test_dark_std: f64,
    pub process_noise_std: f64,
    pub max_steps: usize,
    pub discount: f64,
}

impl Default for LightDarkConfig {
    fn default() -> Self {
        Self {
            speed: 0.2,
            light_std: 0.01,
            dark_std: 0.3,
            proposer_light_std: 0.01,
            proposer_dark_std: 0.1,
            bounds: Rect::new(0.0, 0.0, 2.0, 2.0),
            light: Rect::new(1.5, 0.0, 2.0, 2.0),
            start: Rect::new(0.2, 0.2, 0.4, 1.8),
            goal: Rect::new(0.6, 0.3, 0.9, 0.6),
            fixed_traps: vec![Rect::new(0.6, 0.0, 0.9, 0.3), Rect::new(0.6, 0.6, 0.9, 0.9)],
            trap_size: 0.5,
            trap_count: 2,
            trap_strip: Rect::new(0.8, 0.0, 1.3, 2.0),
            test_dark_std: 0.6,
            process_noise_std: 0.0,
            max_steps: 200,
            discount: 0.99,
        }
    }
}

impl LightDarkConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.light_std > 0.0 && self.light_std < self.dark_std) {
            return Err(ConfigError::param("light_std", "must be positive and below dark_std"));
        }
        if !(self.proposer_light_std > 0.0 && self.proposer_dark_std > 0.0) {
            return Err(ConfigError::param("proposer_std", "must be positive"));
        }
        if !positive(self.test_dark_std) {
            return Err(ConfigError::param("test_dark_std", "must be positive"));
        }
        if !positive(self.trap_size) || self.trap_size > self.bounds.width() || self.trap_size > self.bounds.height() {
            return Err(ConfigError::param("trap_size", "must fit inside the bounds"));
        }
        if self.trap_strip.intersection(&self.bounds).is_none() {
            return Err(ConfigError::param("trap_strip", "must intersect the bounds"));
        }
        Ok(())
    }

    pub fn map(&self) -> EnvMap {
        let mut regions = vec![
            Region::new("goal", RegionKind::Goal, self.goal),
            Region::new("light", RegionKind::Light, self.light),
            Region::new("start", RegionKind::Start, self.start),
        ];
        for (i, t) in self.fixed_traps.iter().enumerate() {
            regions.push(Region::new(format!("trap_{i}"), RegionKind::Trap, *t));
        }
        EnvMap::new(self.bounds, Vec::new(), regions)
    }

    /// Observation std at `s` under this configuration.
    pub fn obs_std(&self, map: &EnvMap, s: StateVec) -> f64 {
        if is_light(map, s) {
            self.light_std
        } else {
            self.dark_std
        }
    }
}

pub fn is_light(map: &EnvMap, s: StateVec) -> bool {
    map.in_region(s, RegionKind::Light)
}

/// `o = s + eps`, `eps ~ N(0, sigma(region(s))^2 I)`.
pub fn lightdark_observe(cfg: &LightDarkConfig, map: &EnvMap, s: StateVec, rng: &mut SimRng) -> [f64; 2] {
    let std = cfg.obs_std(map, s);
    [s.x + gaussian(rng, std), s.y + gaussian(rng, std)]
}

/// `N(o; s, sigma(region(s))^2 I)`.
pub fn lightdark_density(cfg: &LightDarkConfig, map: &EnvMap, o: &[f64; 2], s: StateVec) -> f64 {
    let std = cfg.obs_std(map, s);
    let dx = o[0] - s.x;
    let dy = o[1] - s.y;
    let var = std * std;
    (-(dx * dx + dy * dy) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var)
}

/// `o + N(0, sigma_prop(region(o))^2 I)`, clamped into the bounds.
pub fn lightdark_propose(cfg: &LightDarkConfig, map: &EnvMap, o: &[f64; 2], rng: &mut SimRng) -> StateVec {
    let center = StateVec::new(o[0], o[1]);
    let std = if is_light(map, center) {
        cfg.proposer_light_std
    } else {
        cfg.proposer_dark_std
    };
    map.bounds
        .clamp(center + StateVec::new(gaussian(rng, std), gaussian(rng, std)))
}

/// Places `cfg.trap_count` squares of side `cfg.trap_size` uniformly in
/// the trap strip (clipped to the bounds), redrawing any that overlap the goal.
pub fn spawn_test_traps(cfg: &LightDarkConfig, rng: &mut SimRng) -> Vec<Region> {
    let strip = cfg.trap_strip.intersection(&cfg.bounds).unwrap_or(cfg.bounds);
    let size = cfg.trap_size;
    let axis = |lo: f64, hi: f64, rng: &mut SimRng| {
        if hi - lo > size {
            rng.random_range(lo..=hi - size)
        } else {
            // Strip narrower than a trap: center the trap on it, then keep it in bounds.
            0.5 * (lo + hi) - 0.5 * size
        }
    };
    let mut traps = Vec::with_capacity(cfg.trap_count);
    while traps.len() < cfg.trap_count {
        let mut placed = None;
        for _ in 0..10_000 {
            let x = axis(strip.min.x, strip.max.x, rng).clamp(cfg.bounds.min.x, cfg.bounds.max.x - size);
            let y = axis(strip.min.y, strip.max.y, rng).clamp(cfg.bounds.min.y, cfg.bounds.max.y - size);
            let rect = Rect::new(x, y, x + size, y + size);
            if !rect.overlaps(&cfg.goal) {
                placed = Some(rect);
                break;
            }
        }
        let Some(rect) = placed else { break };
        traps.push(Region::new(
            format!("test_trap_{}", traps.len()),
            RegionKind::Trap,
            rect,
        ));
    }
    traps
}

#[derive(Debug, Clone)]
pub struct LightDarkEnv {
    spec: PomdpSpec,
    map: EnvMap,
    cfg: LightDarkConfig,
    /// Dark-region std used when generating observations.
    generator_dark_std: f64,
}

impl LightDarkEnv {
    pub fn new(cfg: LightDarkConfig) -> Result<Self, ConfigError> {
        let map = cfg.map();
        Self::with_map(cfg, map)
    }

    pub fn with_map(cfg: LightDarkConfig, map: EnvMap) -> Result<Self, ConfigError> {
        cfg.validate()?;
        map.validate()?;
        let spec = PomdpSpec::compass(cfg.speed, cfg.discount, cfg.max_steps);
        spec.validate()?;
        Ok(Self {
            spec,
            map,
            generator_dark_std: cfg.dark_std,
            cfg,
        })
    }

    /// Adds test-time trap regions to the reward function.
    pub fn with_traps(mut self, traps: Vec<Region>) -> Result<Self, ConfigError> {
        self.map.regions.extend(traps);
        self.map.validate()?;
        Ok(self)
    }

    /// The world generates dark observations with `std` while the density
    /// keeps the configured `dark_std`.
    pub fn with_generator_dark_std(mut self, std: f64) -> Result<Self, ConfigError> {
        if !positive(std) {
            return Err(ConfigError::param("test_dark_std", "must be positive"));
        }
        self.generator_dark_std = std;
        Ok(self)
    }

    pub fn with_spec(mut self, spec: PomdpSpec) -> Result<Self, ConfigError> {
        spec.validate()?;
        self.spec = spec;
        Ok(self)
    }

    pub fn map(&self) -> &EnvMap {
        &self.map
    }

    pub fn config(&self) -> &LightDarkConfig {
        &self.cfg
    }
}

impl ModelSuite for LightDarkEnv {
    type State = StateVec;
    type Obs = [f64; 2];

    fn spec(&self) -> &PomdpSpec {
        &self.spec
    }

    fn transition(&self, s: &StateVec, a: ActionId, rng: &mut SimRng) -> StateVec {
        nav_transition(&self.spec, &self.map, *s, a, self.cfg.process_noise_std, rng)
    }

    fn obs_density(&self, o: &[f64; 2], s: &StateVec) -> f64 {
        lightdark_density(&self.cfg, &self.map, o, *s)
    }

    fn generate_obs(&self, s: &StateVec, rng: &mut SimRng) -> [f64; 2] {
        let std = if is_light(&self.map, *s) {
            self.cfg.light_std
        } else {
            self.generator_dark_std
        };
        [s.x + gaussian(rng, std), s.y + gaussian(rng, std)]
    }

    fn propose(&self, o: &[f64; 2], rng: &mut SimRng) -> StateVec {
        lightdark_propose(&self.cfg, &self.map, o, rng)
    }

    fn reward(&self, s: &StateVec, _a: ActionId, next: &StateVec) -> f64 {
        nav_reward(&self.spec, &self.map, *s, *next)
    }

    fn terminal(&self, s: &StateVec) -> Terminal {
        if self.map.in_goal(*s) {
            Terminal::Goal
        } else {
            Terminal::Continue
        }
    }

    fn sample_initial_state(&self, rng: &mut SimRng) -> Result<StateVec, ConfigError> {
        self.map.sample_start(rng)
    }

    fn is_trap(&self, s: &StateVec) -> bool {
        self.map.in_trap(*s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pomdp::apply_action;
    use crate::rng::seeded;

    #[test]
    fn north_east_step() {
        let env = LightDarkEnv::new(LightDarkConfig::default()).unwrap();
        let s = apply_action(env.spec(), env.map(), StateVec::new(0.5, 0.5), ActionId(1));
        let d = 0.2 / 2f64.sqrt();
        assert!((s.x - (0.5 + d)).abs() < 1e-12);
        assert!((s.y - (0.5 + d)).abs() < 1e-12);
    }

    #[test]
    fn trap_entry_costs_without_ending() {
        let env = LightDarkEnv::new(LightDarkConfig::default()).unwrap();
        let s = StateVec::new(0.75, 1.05);
        let next = apply_action(env.spec(), env.map(), s, ActionId(6));
        assert!(env.map().in_trap(next));
        assert_eq!(env.reward(&s, ActionId(6), &next), -100.0);
        assert_eq!(env.terminal(&next), Terminal::Continue);
    }

    #[test]
    fn density_mode_at_state() {
        let cfg = LightDarkConfig::default();
        let map = cfg.map();
        let s = StateVec::new(0.7, 1.2);
        let peak = lightdark_density(&cfg, &map, &[0.7, 1.2], s);
        for o in [[0.71, 1.2], [0.7, 1.1], [1.0, 0.0]] {
            assert!(lightdark_density(&cfg, &map, &o, s) < peak);
        }
    }

    #[test]
    fn traps_are_repeatable_and_in_bounds() {
        let cfg = LightDarkConfig::default();
        let a = spawn_test_traps(&cfg, &mut seeded(5));
        let b = spawn_test_traps(&cfg, &mut seeded(5));
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for t in &a {
            assert!(cfg.bounds.contains(t.rect.min) && cfg.bounds.contains(t.rect.max));
            assert!(!t.rect.overlaps(&cfg.goal));
            assert!((t.rect.width() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn config_invariant() {
        let cfg = LightDarkConfig {
            light_std: 0.5,
            ..LightDarkConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
