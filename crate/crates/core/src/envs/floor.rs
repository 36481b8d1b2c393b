//! Floor Positioning: two stacked floors with a shared corridor layout.
//!
//! The agent starts near the middle of either floor's corridor and senses
//! the distance to the nearest wall in the four cardinal directions. Inside
//! the corridors the two floors produce identical readings; above and below
//! the corridors short divider walls sit at different x positions on each
//! floor, so those "wall states" reveal which floor the agent is on. The goal
//! is the left end of the top corridor and the right end of the bottom one;
//! the traps are at the opposite ends.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{positive, ConfigError};
use crate::geometry::{Rect, Segment, StateVec};
use crate::map::{EnvMap, Region, RegionKind};
use crate::pomdp::{ActionId, ModelSuite, PomdpSpec, Terminal};
use crate::rng::SimRng;

use super::{gaussian, log_gaussian, nav_reward, nav_transition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FloorConfig {
    pub speed: f64,
    /// Radar noise standard deviation.
    pub obs_noise_std: f64,
    /// Divider x positions on the bottom and top floors.
    pub bottom_dividers: Vec<f64>,
    pub top_dividers: Vec<f64>,
    /// Corridor band, as y offsets within a floor of height 0.5.
    pub corridor: (f64, f64),
    /// Length of the goal and trap cells at the corridor ends.
    pub end_length: f64,
    /// Half width of the start strip around x = 0.5.
    pub start_half_width: f64,
    /// Candidates per proposer stage.
    pub proposer_candidates: usize,
    pub process_noise_std: f64,
    pub max_steps: usize,
    pub discount: f64,
}

impl Default for FloorConfig {
    fn default() -> Self {
        Self {
            speed: 0.05,
            obs_noise_std: 0.01,
            bottom_dividers: vec![0.25, 0.5, 0.75],
            top_dividers: vec![0.125, 0.375, 0.625, 0.875],
            corridor: (0.2, 0.3),
            end_length: 0.05,
            start_half_width: 0.05,
            proposer_candidates: 256,
            process_noise_std: 0.0,
            max_steps: 200,
            discount: 0.99,
        }
    }
}

impl FloorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !positive(self.obs_noise_std) {
            return Err(ConfigError::param("obs_noise_std", "must be positive"));
        }
        if self.bottom_dividers == self.top_dividers {
            return Err(ConfigError::param(
                "dividers",
                "top and bottom floors need different divider positions",
            ));
        }
        if self.proposer_candidates == 0 {
            return Err(ConfigError::param("proposer_candidates", "must be positive"));
        }
        Ok(())
    }

    /// The shipped two-floor layout on the unit square.
    pub fn default_map(&self) -> EnvMap {
        let (c0, c1) = self.corridor;
        let mut walls = vec![Segment::new(0.0, 0.5, 1.0, 0.5)];
        for (base, xs) in [(0.0, &self.bottom_dividers), (0.5, &self.top_dividers)] {
            for &x in xs.iter() {
                walls.push(Segment::new(x, base, x, base + c0));
                walls.push(Segment::new(x, base + c1, x, base + 0.5));
            }
        }
        let e = self.end_length;
        let h = self.start_half_width;
        let regions = vec![
            Region::new("goal_top", RegionKind::Goal, Rect::new(0.0, 0.5 + c0, e, 0.5 + c1)),
            Region::new("goal_bottom", RegionKind::Goal, Rect::new(1.0 - e, c0, 1.0, c1)),
            Region::new(
                "trap_top",
                RegionKind::Trap,
                Rect::new(1.0 - e, 0.5 + c0, 1.0, 0.5 + c1),
            ),
            Region::new("trap_bottom", RegionKind::Trap, Rect::new(0.0, c0, e, c1)),
            Region::new(
                "start_top",
                RegionKind::Start,
                Rect::new(0.5 - h, 0.5 + c0, 0.5 + h, 0.5 + c1),
            ),
            Region::new("start_bottom", RegionKind::Start, Rect::new(0.5 - h, c0, 0.5 + h, c1)),
        ];
        EnvMap::new(Rect::new(0.0, 0.0, 1.0, 1.0), walls, regions)
    }
}

#[derive(Debug, Clone)]
pub struct FloorEnv {
    spec: PomdpSpec,
    map: EnvMap,
    cfg: FloorConfig,
}

impl FloorEnv {
    pub fn new(cfg: FloorConfig) -> Result<Self, ConfigError> {
        let map = cfg.default_map();
        Self::with_map(cfg, map)
    }

    pub fn with_map(cfg: FloorConfig, map: EnvMap) -> Result<Self, ConfigError> {
        cfg.validate()?;
        map.validate()?;
        let spec = PomdpSpec::compass(cfg.speed, cfg.discount, cfg.max_steps);
        spec.validate()?;
        Ok(Self { spec, map, cfg })
    }

    pub fn with_spec(mut self, spec: PomdpSpec) -> Result<Self, ConfigError> {
        spec.validate()?;
        self.spec = spec;
        Ok(self)
    }

    pub fn map(&self) -> &EnvMap {
        &self.map
    }

    pub fn config(&self) -> &FloorConfig {
        &self.cfg
    }
}

/// Noisy radar reading at `s`: four ranges, each with independent
/// `N(0, std^2)` noise, clamped at zero.
pub fn radar_observe(map: &EnvMap, s: StateVec, std: f64, rng: &mut SimRng) -> Result<[f64; 4], ConfigError> {
    if map.on_wall(s) {
        return Err(ConfigError::StateOnWall(s.x, s.y));
    }
    if !map.bounds.contains(s) {
        return Err(ConfigError::OutOfBounds(s.x, s.y));
    }
    Ok(noisy_ranges(map, s, std, rng))
}

fn noisy_ranges(map: &EnvMap, s: StateVec, std: f64, rng: &mut SimRng) -> [f64; 4] {
    map.ray_ranges(s).map(|r| (r + gaussian(rng, std)).max(0.0))
}

pub fn radar_log_density(map: &EnvMap, o: &[f64; 4], s: StateVec, std: f64) -> f64 {
    map.ray_ranges(s)
        .iter()
        .zip(o)
        .map(|(r, oi)| log_gaussian(*oi, *r, std))
        .sum()
}

/// `prod_i N(o_i; ray_i(s), std^2)`.
pub fn radar_density(map: &EnvMap, o: &[f64; 4], s: StateVec, std: f64) -> f64 {
    radar_log_density(map, o, s, std).exp()
}

/// Proposal for radar reading `o`.
///
/// Two self-normalised importance stages of `candidates` draws each: the
/// first uniform over free space, the second Gaussian (std 0.05) around the
/// first stage's pick. The second pick is jittered with `N(0, 0.01^2)`.
pub fn radar_propose(map: &EnvMap, o: &[f64; 4], std: f64, candidates: usize, rng: &mut SimRng) -> StateVec {
    let coarse: Vec<StateVec> = (0..candidates).map(|_| map.sample_free(rng)).collect();
    let pick = importance_pick(map, o, std, &coarse, rng);
    let fine: Vec<StateVec> = (0..candidates).map(|_| jitter(map, pick, 0.05, rng)).collect();
    let pick = importance_pick(map, o, std, &fine, rng);
    jitter(map, pick, 0.01, rng)
}

fn jitter(map: &EnvMap, p: StateVec, std: f64, rng: &mut SimRng) -> StateVec {
    for _ in 0..64 {
        let q = map
            .bounds
            .clamp(p + StateVec::new(gaussian(rng, std), gaussian(rng, std)));
        if !map.on_wall(q) {
            return q;
        }
    }
    p
}

fn importance_pick(map: &EnvMap, o: &[f64; 4], std: f64, candidates: &[StateVec], rng: &mut SimRng) -> StateVec {
    let logw: Vec<f64> = candidates.iter().map(|c| radar_log_density(map, o, *c, std)).collect();
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (c, wi) in candidates.iter().zip(&w) {
        if u < *wi {
            return *c;
        }
        u -= wi;
    }
    candidates[candidates.len() - 1]
}

impl ModelSuite for FloorEnv {
    type State = StateVec;
    type Obs = [f64; 4];

    fn spec(&self) -> &PomdpSpec {
        &self.spec
    }

    fn transition(&self, s: &StateVec, a: ActionId, rng: &mut SimRng) -> StateVec {
        nav_transition(&self.spec, &self.map, *s, a, self.cfg.process_noise_std, rng)
    }

    fn obs_density(&self, o: &[f64; 4], s: &StateVec) -> f64 {
        radar_density(&self.map, o, *s, self.cfg.obs_noise_std)
    }

    fn generate_obs(&self, s: &StateVec, rng: &mut SimRng) -> [f64; 4] {
        noisy_ranges(&self.map, *s, self.cfg.obs_noise_std, rng)
    }

    fn propose(&self, o: &[f64; 4], rng: &mut SimRng) -> StateVec {
        radar_propose(&self.map, o, self.cfg.obs_noise_std, self.cfg.proposer_candidates, rng)
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

    fn env() -> FloorEnv {
        FloorEnv::new(FloorConfig::default()).unwrap()
    }

    #[test]
    fn east_move_at_agent_speed() {
        let e = env();
        let s = apply_action(&e.spec, &e.map, StateVec::new(0.5, 0.25), ActionId(0));
        assert!((s.x - 0.55).abs() < 1e-12 && (s.y - 0.25).abs() < 1e-12);
    }

    #[test]
    fn walls_block_motion() {
        let e = env();
        // Just below the floor wall, moving north.
        let s = StateVec::new(0.6, 0.48);
        assert_eq!(apply_action(&e.spec, &e.map, s, ActionId(2)), s);
        // Beside the bottom divider at x = 0.5, moving east.
        let s = StateVec::new(0.48, 0.1);
        assert_eq!(apply_action(&e.spec, &e.map, s, ActionId(0)), s);
    }

    #[test]
    fn radar_rejects_states_on_walls() {
        let e = env();
        let mut rng = seeded(0);
        assert!(radar_observe(&e.map, StateVec::new(0.5, 0.1), 0.0, &mut rng).is_err());
        assert!(radar_observe(&e.map, StateVec::new(0.5, 1.5), 0.0, &mut rng).is_err());
        assert!(radar_observe(&e.map, StateVec::new(0.4, 0.1), 0.0, &mut rng).is_ok());
    }

    #[test]
    fn empty_box_center_reads_half() {
        let map = EnvMap::new(Rect::new(0.0, 0.0, 1.0, 1.0), vec![], vec![]);
        let o = radar_observe(&map, StateVec::new(0.5, 0.5), 0.0, &mut seeded(1)).unwrap();
        assert_eq!(o, [0.5; 4]);
    }

    #[test]
    fn density_peak_and_tail() {
        let e = env();
        let std = e.cfg.obs_noise_std;
        let s = StateVec::new(0.3, 0.25);
        let o = e.map.ray_ranges(s);
        let peak = e.obs_density(&o, &s);
        let expected = (2.0 * std::f64::consts::PI * std * std).powi(-2);
        assert!((peak / expected - 1.0).abs() < 1e-10);

        let mut far = o;
        far[0] += 10.0 * std;
        // Evaluate the same reading at the matching state and at one shifted by 10 sigma.
        let s_far = StateVec::new(0.3, 0.25 - 10.0 * std);
        let o_far = e.map.ray_ranges(s_far);
        assert!((o_far[0] - far[0]).abs() < 1e-9);
        let ratio = e.obs_density(&o, &s) / e.obs_density(&o, &s_far);
        assert!(ratio > 1e20, "ratio {ratio}");
        assert!(e.obs_density(&[5.0, -3.0, 0.0, 100.0], &s) >= 0.0);
    }
}
