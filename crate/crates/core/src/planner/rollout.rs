use crate::filter::ParticleBelief;
use crate::geometry::StateVec;
use crate::map::EnvMap;
use crate::pomdp::{ModelSuite, PomdpSpec, Terminal};
use crate::rng::SimRng;

use super::gen_pf::pick_index;

/// Value estimate for a freshly expanded belief node.
pub trait RolloutPolicy<M: ModelSuite> {
    fn estimate(&self, models: &M, belief: &ParticleBelief<M::State>, discount: f64, rng: &mut SimRng) -> f64;
}

/// Leaf value of zero: the search relies on depth alone.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroRollout;

impl<M: ModelSuite> RolloutPolicy<M> for ZeroRollout {
    fn estimate(&self, _: &M, _: &ParticleBelief<M::State>, _: f64, _: &mut SimRng) -> f64 {
        0.0
    }
}

/// Straight-to-goal estimate that assumes the belief collapses onto one
/// sampled particle.
#[derive(Debug, Clone, Copy)]
pub struct CollapseRollout<'a> {
    pub map: &'a EnvMap,
    pub spec: &'a PomdpSpec,
}

impl<'a> CollapseRollout<'a> {
    pub fn new(map: &'a EnvMap, spec: &'a PomdpSpec) -> Self {
        Self { map, spec }
    }
}

impl<M: ModelSuite<State = StateVec>> RolloutPolicy<M> for CollapseRollout<'_> {
    /// Particles already in a terminal state were paid when they arrived and
    /// contribute nothing further.
    fn estimate(&self, models: &M, belief: &ParticleBelief<StateVec>, discount: f64, rng: &mut SimRng) -> f64 {
        let (particles, weights): (Vec<StateVec>, Vec<f64>) = belief
            .particles()
            .iter()
            .zip(belief.weights())
            .filter(|(s, w)| **w > 0.0 && models.terminal(s) == Terminal::Continue)
            .map(|(s, w)| (*s, *w))
            .unzip();
        if particles.is_empty() {
            return 0.0;
        }
        collapse_value(&particles, &weights, self.map, self.spec, discount, rng)
    }
}

/// Collapse rollout over the whole belief.
///
/// One particle `j` is drawn by weight. It travels the straight line to the
/// center of its nearest goal, entering it after `k = ceil(d / speed)` steps
/// where `d` is the distance to the goal's nearest point (no shift when it
/// is already inside), and earns
/// `gamma^k * goal_reward`. Every other particle is shifted by the same
/// vector and earns `gamma^k` times the terminal value at its endpoint
/// (goal reward, trap penalty or zero). Returns the weight-summed value.
pub fn rollout_collapse(
    belief: &ParticleBelief<StateVec>,
    map: &EnvMap,
    spec: &PomdpSpec,
    discount: f64,
    rng: &mut SimRng,
) -> f64 {
    collapse_value(belief.particles(), belief.weights(), map, spec, discount, rng)
}

fn collapse_value(
    particles: &[StateVec],
    weights: &[f64],
    map: &EnvMap,
    spec: &PomdpSpec,
    discount: f64,
    rng: &mut SimRng,
) -> f64 {
    let j = pick_index(weights, rng);
    let origin = particles[j];
    let Some(goal) = map.nearest_goal(origin) else {
        return 0.0;
    };
    let entry = goal.rect.nearest_point(origin).distance(origin);
    let shift = if entry > 0.0 {
        goal.rect.center() - origin
    } else {
        StateVec::default()
    };
    let speed = spec.actions.iter().map(|a| a.speed).fold(0.0, f64::max);
    let steps = if speed > 0.0 {
        (entry / speed - 1e-9).ceil().max(0.0)
    } else {
        0.0
    };
    let scale = discount.powf(steps);

    let mut value = 0.0;
    for (i, (&s, &w)) in particles.iter().zip(weights).enumerate() {
        let terminal_value = if i == j {
            spec.goal_reward
        } else {
            let end = map.bounds.clamp(s + shift);
            if map.in_goal(end) {
                spec.goal_reward
            } else if map.in_trap(end) {
                spec.trap_penalty
            } else {
                0.0
            }
        };
        value += w * terminal_value;
    }
    scale * value
}
