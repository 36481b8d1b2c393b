//! Action selection strategies the harness can put in the loop.

use rand::Rng;

use vts_core::filter::ParticleBelief;
use vts_core::map::EnvMap;
use vts_core::planner::{PlanDiagnostics, RolloutPolicy};
use vts_core::{ActionId, ModelSuite, Pft, PlannerParams, RegionKind, SimRng, StateVec};

pub trait Policy<M: ModelSuite> {
    fn act(&mut self, models: &M, belief: &ParticleBelief<M::State>, rng: &mut SimRng) -> ActionId;

    /// Search statistics of the last call, when the policy keeps them.
    fn take_diagnostics(&mut self) -> Option<PlanDiagnostics> {
        None
    }
}

/// PFT-DPW over the agent's models.
pub struct PftPolicy<R> {
    pub rollout: R,
    pub params: PlannerParams,
    pub keep_diagnostics: bool,
    last: Option<PlanDiagnostics>,
}

impl<R> PftPolicy<R> {
    pub fn new(rollout: R, params: PlannerParams) -> Self {
        Self {
            rollout,
            params,
            keep_diagnostics: false,
            last: None,
        }
    }

    pub fn with_diagnostics(mut self, keep: bool) -> Self {
        self.keep_diagnostics = keep;
        self
    }
}

impl<M: ModelSuite, R: RolloutPolicy<M>> Policy<M> for PftPolicy<R> {
    fn act(&mut self, models: &M, belief: &ParticleBelief<M::State>, rng: &mut SimRng) -> ActionId {
        let planner = Pft::new(models, &self.rollout, self.params.clone());
        if self.keep_diagnostics {
            let (a, diag) = planner.plan_with_diagnostics(belief, rng);
            self.last = Some(diag);
            a
        } else {
            planner.plan(belief, rng)
        }
    }

    fn take_diagnostics(&mut self) -> Option<PlanDiagnostics> {
        self.last.take()
    }
}

/// Heads from the belief mean toward the nearest goal point, or toward the
/// goal's center once the mean is inside a goal. Ignores traps.
pub struct StraightToGoal<'a> {
    pub map: &'a EnvMap,
}

impl<M: ModelSuite<State = StateVec>> Policy<M> for StraightToGoal<'_> {
    fn act(&mut self, models: &M, belief: &ParticleBelief<StateVec>, _rng: &mut SimRng) -> ActionId {
        let m = belief.mean();
        let mean = StateVec::new(m[0], m[1]);
        let goal = self.map.regions_of(RegionKind::Goal).find(|g| g.rect.contains(mean));
        let target = match goal {
            Some(g) => g.rect.center(),
            None => self.map.nearest_goal_point(mean).unwrap_or(mean),
        };
        best_heading(models, target - mean)
    }
}

/// Action whose direction is closest to `dir`; ties and a zero `dir` go to
/// the lowest id.
pub fn best_heading<M: ModelSuite>(models: &M, dir: StateVec) -> ActionId {
    let n = dir.norm();
    if n < 1e-12 {
        return ActionId(0);
    }
    let unit = dir * (1.0 / n);
    let mut best = ActionId(0);
    let mut best_dot = f64::NEG_INFINITY;
    for (i, a) in models.spec().actions.iter().enumerate() {
        let Some(d) = a.direction else { continue };
        let dot = d.dot(unit);
        if dot > best_dot + 1e-12 {
            best = ActionId(i);
            best_dot = dot;
        }
    }
    best
}

/// Uniformly random actions.
pub struct RandomPolicy;

impl<M: ModelSuite> Policy<M> for RandomPolicy {
    fn act(&mut self, models: &M, _: &ParticleBelief<M::State>, rng: &mut SimRng) -> ActionId {
        ActionId(rng.random_range(0..models.spec().action_count()))
    }
}

/// Replays a fixed action list, repeating the last entry once it runs out.
pub struct Scripted {
    actions: Vec<ActionId>,
    next: usize,
}

impl Scripted {
    pub fn new(actions: Vec<ActionId>) -> Self {
        assert!(!actions.is_empty(), "scripted policy needs at least one action");
        Self { actions, next: 0 }
    }
}

impl<M: ModelSuite> Policy<M> for Scripted {
    fn act(&mut self, _: &M, _: &ParticleBelief<M::State>, _: &mut SimRng) -> ActionId {
        let a = self.actions[self.next.min(self.actions.len() - 1)];
        self.next += 1;
        a
    }
}
