//! The classic Tiger problem, used as a discrete oracle for the planner.
//!
//! A tiger sits behind one of two doors. Listening costs 1 and reports the
//! tiger's side correctly with probability 0.85. Opening the tiger-free door
//! pays 10, opening the tiger's door costs 100, and either opening resets the
//! tiger to a uniformly random side.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::pomdp::{ActionDef, ActionId, Coords, EpisodeEnd, ModelSuite, PomdpSpec, Terminal};
use crate::rng::SimRng;

pub const LISTEN: ActionId = ActionId(0);
pub const OPEN_LEFT: ActionId = ActionId(1);
pub const OPEN_RIGHT: ActionId = ActionId(2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn random(rng: &mut SimRng) -> Self {
        if rng.random::<bool>() {
            Side::Left
        } else {
            Side::Right
        }
    }

    fn other(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TigerState {
    pub tiger: Side,
    /// The doors were just reset; the next observation carries no information.
    pub reset: bool,
}

impl Coords for TigerState {
    fn dim(&self) -> usize {
        1
    }

    /// Indicator of the tiger being on the left, so a belief mean is `P(left)`.
    fn coord(&self, _i: usize) -> f64 {
        if self.tiger == Side::Left {
            1.0
        } else {
            0.0
        }
    }
}

/// What the agent hears: the side the growl seems to come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TigerObs(pub Side);

impl Coords for TigerObs {
    fn dim(&self) -> usize {
        1
    }

    fn coord(&self, _i: usize) -> f64 {
        if self.0 == Side::Left {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct Tiger {
    spec: PomdpSpec,
    pub accuracy: f64,
    pub listen_cost: f64,
    pub treasure: f64,
    pub tiger_penalty: f64,
}

impl Tiger {
    pub fn new(discount: f64, max_steps: usize) -> Result<Self, ConfigError> {
        let action = |name: &str| ActionDef {
            name: name.to_string(),
            direction: None,
            speed: 0.0,
        };
        let spec = PomdpSpec {
            actions: vec![action("listen"), action("open-left"), action("open-right")],
            discount,
            max_steps,
            goal_reward: 10.0,
            trap_penalty: -100.0,
        };
        spec.validate()?;
        Ok(Self {
            spec,
            accuracy: 0.85,
            listen_cost: -1.0,
            treasure: 10.0,
            tiger_penalty: -100.0,
        })
    }

    /// Spec, models and exact solver as one fixture.
    pub fn fixture(discount: f64, horizon: usize) -> Result<(PomdpSpec, Tiger, TigerSolver), ConfigError> {
        let tiger = Tiger::new(discount, 50)?;
        let solver = TigerSolver::solve(&tiger, horizon, 1001);
        Ok((tiger.spec.clone(), tiger, solver))
    }

    /// Expected immediate reward of `a` when the tiger is on the left with
    /// probability `p_left`.
    pub fn expected_reward(&self, p_left: f64, a: ActionId) -> f64 {
        match a {
            LISTEN => self.listen_cost,
            OPEN_LEFT => p_left * self.tiger_penalty + (1.0 - p_left) * self.treasure,
            _ => (1.0 - p_left) * self.tiger_penalty + p_left * self.treasure,
        }
    }

    /// Posterior `P(left)` after hearing `o` from prior `p_left`, and the
    /// probability of hearing it.
    pub fn listen_update(&self, p_left: f64, o: Side) -> (f64, f64) {
        let q = self.accuracy;
        let like_left = if o == Side::Left { q } else { 1.0 - q };
        let like_right = 1.0 - like_left;
        let evidence = like_left * p_left + like_right * (1.0 - p_left);
        (like_left * p_left / evidence, evidence)
    }
}

impl ModelSuite for Tiger {
    type State = TigerState;
    type Obs = TigerObs;

    fn spec(&self) -> &PomdpSpec {
        &self.spec
    }

    fn transition(&self, s: &TigerState, a: ActionId, rng: &mut SimRng) -> TigerState {
        if a == LISTEN {
            TigerState {
                tiger: s.tiger,
                reset: false,
            }
        } else {
            TigerState {
                tiger: Side::random(rng),
                reset: true,
            }
        }
    }

    fn obs_density(&self, o: &TigerObs, s: &TigerState) -> f64 {
        if s.reset {
            0.5
        } else if o.0 == s.tiger {
            self.accuracy
        } else {
            1.0 - self.accuracy
        }
    }

    fn generate_obs(&self, s: &TigerState, rng: &mut SimRng) -> TigerObs {
        if s.reset {
            TigerObs(Side::random(rng))
        } else if rng.random::<f64>() < self.accuracy {
            TigerObs(s.tiger)
        } else {
            TigerObs(s.tiger.other())
        }
    }

    fn propose(&self, o: &TigerObs, rng: &mut SimRng) -> TigerState {
        let tiger = if rng.random::<f64>() < self.accuracy {
            o.0
        } else {
            o.0.other()
        };
        TigerState { tiger, reset: false }
    }

    fn reward(&self, s: &TigerState, a: ActionId, _next: &TigerState) -> f64 {
        match (a, s.tiger) {
            (LISTEN, _) => self.listen_cost,
            (OPEN_LEFT, Side::Left) | (OPEN_RIGHT, Side::Right) => self.tiger_penalty,
            _ => self.treasure,
        }
    }

    fn terminal(&self, _s: &TigerState) -> Terminal {
        Terminal::Continue
    }

    fn sample_initial_state(&self, rng: &mut SimRng) -> Result<TigerState, ConfigError> {
        Ok(TigerState {
            tiger: Side::random(rng),
            reset: false,
        })
    }

    /// A real episode ends at the first door opened.
    fn episode_end(&self, s: &TigerState, a: ActionId, _next: &TigerState) -> Option<EpisodeEnd> {
        match (a, s.tiger) {
            (LISTEN, _) => None,
            (OPEN_LEFT, Side::Left) | (OPEN_RIGHT, Side::Right) => Some(EpisodeEnd::Failure),
            _ => Some(EpisodeEnd::Success),
        }
    }
}

/// Finite-horizon value iteration over a uniform grid on `P(left)`, with
/// linear interpolation between grid points.
#[derive(Debug, Clone)]
pub struct TigerSolver {
    /// `values[t][i]`: optimal `t`-step value at grid point `i`.
    values: Vec<Vec<f64>>,
    discount: f64,
    tiger: Tiger,
}

impl TigerSolver {
    pub fn solve(tiger: &Tiger, horizon: usize, grid: usize) -> Self {
        assert!(grid >= 2, "belief grid needs at least two points");
        let discount = tiger.spec.discount;
        let mut values = vec![vec![0.0; grid]];
        for _ in 0..horizon {
            let prev = values.last().expect("seeded with V_0");
            let next = (0..grid)
                .map(|i| {
                    let p = i as f64 / (grid - 1) as f64;
                    (0..3)
                        .map(|a| q_value(tiger, discount, prev, p, ActionId(a)))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            values.push(next);
        }
        Self {
            values,
            discount,
            tiger: tiger.clone(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// Optimal `horizon`-step value at `P(left) = p_left`.
    pub fn value(&self, p_left: f64) -> f64 {
        interpolate(&self.values[self.horizon()], p_left)
    }

    /// `Q_H(p, a)` with the `H - 1`-step continuation.
    pub fn q(&self, p_left: f64, a: ActionId) -> f64 {
        let h = self.horizon();
        if h == 0 {
            return 0.0;
        }
        q_value(&self.tiger, self.discount, &self.values[h - 1], p_left, a)
    }

    /// Optimal first action; ties go to the lowest id.
    pub fn best_action(&self, p_left: f64) -> ActionId {
        let mut best = LISTEN;
        let mut best_q = f64::NEG_INFINITY;
        for a in 0..3 {
            let q = self.q(p_left, ActionId(a));
            if q > best_q + 1e-12 {
                best = ActionId(a);
                best_q = q;
            }
        }
        best
    }
}

fn q_value(tiger: &Tiger, discount: f64, prev: &[f64], p: f64, a: ActionId) -> f64 {
    let r = tiger.expected_reward(p, a);
    if a == LISTEN {
        let future: f64 = [Side::Left, Side::Right]
            .into_iter()
            .map(|o| {
                let (post, evidence) = tiger.listen_update(p, o);
                evidence * interpolate(prev, post)
            })
            .sum();
        r + discount * future
    } else {
        r + discount * interpolate(prev, 0.5)
    }
}

fn interpolate(values: &[f64], p: f64) -> f64 {
    let n = values.len() - 1;
    let x = p.clamp(0.0, 1.0) * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let t = x - i as f64;
    values[i] * (1.0 - t) + values[i + 1] * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_belief_opens_safe_door() {
        let (_, _, solver) = Tiger::fixture(0.95, 5).unwrap();
        assert_eq!(solver.best_action(1.0), OPEN_RIGHT);
        assert_eq!(solver.best_action(0.0), OPEN_LEFT);
    }

    #[test]
    fn uniform_belief_listens() {
        for h in 2..12 {
            let (_, _, solver) = Tiger::fixture(0.95, h).unwrap();
            assert_eq!(solver.best_action(0.5), LISTEN, "horizon {h}");
        }
    }

    #[test]
    fn one_listen_posterior() {
        let tiger = Tiger::new(0.95, 50).unwrap();
        let (p, evidence) = tiger.listen_update(0.5, Side::Left);
        assert!((p - 0.85).abs() < 1e-12);
        assert!((evidence - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reset_hides_the_tiger() {
        let tiger = Tiger::new(0.95, 50).unwrap();
        let s = TigerState {
            tiger: Side::Left,
            reset: true,
        };
        assert_eq!(tiger.obs_density(&TigerObs(Side::Left), &s), 0.5);
        assert_eq!(tiger.obs_density(&TigerObs(Side::Right), &s), 0.5);
    }
}
