//! Concrete problems with analytic model suites.
//!
//! * [`floor`]: two indistinguishable floors sensed by a four-beam radar.
//! * [`lightdark`]: 2D navigation with region-dependent observation noise.
//! * [`tiger`]: the two-door Tiger problem with an exact belief-grid solver.

pub mod config;
pub mod floor;
pub mod lightdark;
pub mod tiger;

use rand_distr::{Distribution, Normal};

use crate::geometry::StateVec;
use crate::map::EnvMap;
use crate::pomdp::{move_by, ActionId, PomdpSpec};
use crate::rng::SimRng;

pub use config::EnvFile;
pub use floor::{FloorConfig, FloorEnv};
pub use lightdark::{LightDarkConfig, LightDarkEnv};
pub use tiger::{Tiger, TigerSolver};

pub(crate) fn gaussian(rng: &mut SimRng, std: f64) -> f64 {
    if std <= 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std).expect("finite std").sample(rng)
}

pub(crate) fn log_gaussian(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    -0.5 * z * z - std.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Deterministic compass motion with optional additive Gaussian process noise.
pub(crate) fn nav_transition(
    spec: &PomdpSpec,
    map: &EnvMap,
    s: StateVec,
    a: ActionId,
    process_noise: f64,
    rng: &mut SimRng,
) -> StateVec {
    let mut delta = spec.action(a).displacement();
    if process_noise > 0.0 {
        delta = delta + StateVec::new(gaussian(rng, process_noise), gaussian(rng, process_noise));
    }
    move_by(map, s, delta)
}

/// Goal reward on arrival plus the trap penalty for every step that ends in a trap.
pub(crate) fn nav_reward(spec: &PomdpSpec, map: &EnvMap, s: StateVec, next: StateVec) -> f64 {
    let mut r = 0.0;
    if map.in_goal(next) && !map.in_goal(s) {
        r += spec.goal_reward;
    }
    if map.in_trap(next) {
        r += spec.trap_penalty;
    }
    r
}
