//! The POMDP abstraction shared by the filter, the planner and the harness.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{positive, ConfigError};
use crate::geometry::StateVec;
use crate::map::EnvMap;
use crate::rng::SimRng;

/// Index into a problem's discrete action table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

/// One entry of the action table. Navigation actions carry a unit direction
/// and a speed; discrete problems leave `direction` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDef {
    pub name: String,
    pub direction: Option<StateVec>,
    pub speed: f64,
}

impl ActionDef {
    pub fn displacement(&self) -> StateVec {
        self.direction.map_or(StateVec::default(), |d| d * self.speed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PomdpSpec {
    pub actions: Vec<ActionDef>,
    pub discount: f64,
    pub max_steps: usize,
    pub goal_reward: f64,
    pub trap_penalty: f64,
}

const COMPASS: [&str; 8] = ["E", "NE", "N", "NW", "W", "SW", "S", "SE"];

impl PomdpSpec {
    /// Eight full-thrust moves in compass order E, NE, N, NW, W, SW, S, SE.
    pub fn compass(speed: f64, discount: f64, max_steps: usize) -> Self {
        let actions = COMPASS
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let angle = i as f64 * std::f64::consts::FRAC_PI_4;
                let (s, c) = angle.sin_cos();
                // Snap the exact zeros so axis moves stay on the grid.
                let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
                ActionDef {
                    name: (*name).to_string(),
                    direction: Some(StateVec::new(snap(c), snap(s))),
                    speed,
                }
            })
            .collect();
        Self {
            actions,
            discount,
            max_steps,
            goal_reward: 100.0,
            trap_penalty: -100.0,
        }
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, a: ActionId) -> &ActionDef {
        &self.actions[a.0]
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.actions
            .iter()
            .position(|d| d.name.eq_ignore_ascii_case(name))
            .map(ActionId)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.actions.is_empty() {
            return Err(ConfigError::param("actions", "action table is empty"));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(ConfigError::param("discount", "must lie in [0, 1)"));
        }
        if self.max_steps == 0 {
            return Err(ConfigError::param("max_steps", "must be positive"));
        }
        if self.actions.iter().any(|a| a.direction.is_some() && !positive(a.speed)) {
            return Err(ConfigError::param("speed", "must be positive"));
        }
        Ok(())
    }
}

/// Fixed-length real view of a state or observation, used for belief means,
/// particle distances and trace output.
pub trait Coords {
    fn dim(&self) -> usize;
    fn coord(&self, i: usize) -> f64;

    fn to_vec(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }
}

impl Coords for StateVec {
    fn dim(&self) -> usize {
        2
    }
    fn coord(&self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => panic!("StateVec has two coordinates, asked for {i}"),
        }
    }
}

impl<const N: usize> Coords for [f64; N] {
    fn dim(&self) -> usize {
        N
    }
    fn coord(&self, i: usize) -> f64 {
        self[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Continue,
    Goal,
}

/// Why an episode stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeEnd {
    Success,
    Failure,
    StepLimit,
}

/// The generative and evaluative models of one problem instance.
///
/// The filter consumes `transition`, `obs_density` and `propose`; the planner
/// consumes `transition`, `obs_density`, `generate_obs`, `reward` and
/// `terminal`. Implementations are immutable and must be deterministic given
/// the supplied rng.
pub trait ModelSuite: Sync {
    type State: Clone + Debug + Send + Sync + Coords;
    type Obs: Clone + Debug + Send + Sync + Coords;

    fn spec(&self) -> &PomdpSpec;

    fn transition(&self, s: &Self::State, a: ActionId, rng: &mut SimRng) -> Self::State;

    /// Likelihood `Z(o | s)`; finite and non-negative.
    fn obs_density(&self, o: &Self::Obs, s: &Self::State) -> f64;

    /// Draw `o ~ Z(. | s)`.
    fn generate_obs(&self, s: &Self::State, rng: &mut SimRng) -> Self::Obs;

    /// Draw a plausible state for `o` (particle proposer).
    fn propose(&self, o: &Self::Obs, rng: &mut SimRng) -> Self::State;

    fn reward(&self, s: &Self::State, a: ActionId, next: &Self::State) -> f64;

    fn terminal(&self, s: &Self::State) -> Terminal;

    fn sample_initial_state(&self, rng: &mut SimRng) -> Result<Self::State, ConfigError>;

    /// Whether the transition `s -a-> next` ends a real episode.
    fn episode_end(&self, _s: &Self::State, _a: ActionId, next: &Self::State) -> Option<EpisodeEnd> {
        (self.terminal(next) == Terminal::Goal).then_some(EpisodeEnd::Success)
    }

    fn is_trap(&self, _s: &Self::State) -> bool {
        false
    }
}

/// Moves `s` by action `a` at full speed. Motion whose straight path touches
/// a wall is cancelled; unblocked motion is clamped to the map bounds.
pub fn apply_action(spec: &PomdpSpec, map: &EnvMap, s: StateVec, a: ActionId) -> StateVec {
    move_by(map, s, spec.action(a).displacement())
}

pub(crate) fn move_by(map: &EnvMap, s: StateVec, delta: StateVec) -> StateVec {
    let target = s + delta;
    if map.blocks(s, target) {
        s
    } else {
        map.bounds.clamp(target)
    }
}

/// Result of advancing the real environment by one action.
#[derive(Debug, Clone)]
pub struct StepOutcome<S, O> {
    pub next: S,
    pub obs: O,
    pub reward: f64,
    pub done: Option<EpisodeEnd>,
}

/// Advances the true state: `s' ~ T(s, a)`, `o ~ G(s')`, `r = R(s, a, s')`.
/// `steps_taken` counts steps before this one; the episode ends on a terminal
/// transition or when the step budget is exhausted.
pub fn step_env<M: ModelSuite>(
    models: &M,
    s: &M::State,
    a: ActionId,
    steps_taken: usize,
    rng: &mut SimRng,
) -> StepOutcome<M::State, M::Obs> {
    let next = models.transition(s, a, rng);
    let obs = models.generate_obs(&next, rng);
    let reward = models.reward(s, a, &next);
    let done = models
        .episode_end(s, a, &next)
        .or_else(|| (steps_taken + 1 >= models.spec().max_steps).then_some(EpisodeEnd::StepLimit));
    StepOutcome {
        next,
        obs,
        reward,
        done,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compass_moves_share_one_norm() {
        let spec = PomdpSpec::compass(0.2, 0.99, 200);
        assert_eq!(spec.action_count(), 8);
        for a in &spec.actions {
            assert!((a.displacement().norm() - 0.2).abs() < 1e-12);
        }
        assert_eq!(spec.action_by_name("ne"), Some(ActionId(1)));
    }

    #[test]
    fn spec_validation() {
        let mut spec = PomdpSpec::compass(0.05, 0.99, 200);
        assert!(spec.validate().is_ok());
        spec.discount = 1.0;
        assert!(spec.validate().is_err());
        let mut spec = PomdpSpec::compass(0.05, 0.99, 0);
        assert!(spec.validate().is_err());
        spec.max_steps = 1;
        spec.actions[0].speed = 0.0;
        assert!(spec.validate().is_err());
    }
}
