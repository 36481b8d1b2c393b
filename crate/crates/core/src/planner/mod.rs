//! PFT-DPW: Monte Carlo tree search whose nodes hold particle beliefs.
//!
//! Each plan builds a fresh [`SearchTree`] from the current belief, runs
//! `iterations` simulations and returns the root action with the highest
//! value estimate. Branching is limited by double progressive widening: a
//! belief node with `N(b)` visits may hold at most `ceil(k_a * N(b)^alpha_a)`
//! action edges and an action edge with `N(b, a)` visits at most
//! `ceil(k_o * N(b, a)^alpha_o)` belief children.

mod gen_pf;
mod rollout;
mod tree;

pub use gen_pf::{gen_pf, GenPfOutcome};
pub use rollout::{rollout_collapse, CollapseRollout, RolloutPolicy, ZeroRollout};
pub use tree::{ucb_score, ucb_select, widening_allows, widening_limit, ActionEdge, BeliefNode, SearchTree};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::filter::{resample_to, ParticleBelief};
use crate::pomdp::{ActionId, ModelSuite};
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    /// Simulations per plan call (`n`).
    pub iterations: usize,
    /// UCB exploration constant (`c`).
    pub exploration: f64,
    pub action_k: f64,
    pub action_alpha: f64,
    pub obs_k: f64,
    pub obs_alpha: f64,
    /// Particles per tree belief (`m`).
    pub tree_particles: usize,
    /// Maximum search depth (`H`).
    pub max_depth: usize,
    /// Planning discount (`gamma`).
    pub discount: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            iterations: 100,
            exploration: 10.0,
            action_k: 3.0,
            action_alpha: 0.25,
            obs_k: 4.0,
            obs_alpha: 0.25,
            tree_particles: 100,
            max_depth: 10,
            discount: 0.99,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.iterations == 0 {
            return Err(ConfigError::param("iterations", "must be at least 1"));
        }
        if self.tree_particles == 0 {
            return Err(ConfigError::param("tree_particles", "must be at least 1"));
        }
        if self.max_depth == 0 {
            return Err(ConfigError::param("max_depth", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(ConfigError::param("discount", "must lie in [0, 1)"));
        }
        if !(self.exploration >= 0.0 && self.action_k > 0.0 && self.obs_k > 0.0) {
            return Err(ConfigError::param("widening", "constants must be positive"));
        }
        if !(self.action_alpha >= 0.0 && self.obs_alpha >= 0.0) {
            return Err(ConfigError::param("widening", "exponents must be non-negative"));
        }
        Ok(())
    }
}

/// Per-plan diagnostic record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDiagnostics {
    pub action: ActionId,
    pub belief_nodes: usize,
    pub action_edges: usize,
    pub root: Vec<RootActionStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootActionStats {
    pub action: ActionId,
    pub visits: u32,
    pub value: f64,
}

/// The planner: borrows the models and leaf estimator it searches with.
pub struct Pft<'a, M, R> {
    models: &'a M,
    rollout: &'a R,
    params: PlannerParams,
    record_returns: bool,
}

impl<'a, M, R> Pft<'a, M, R>
where
    M: ModelSuite,
    R: RolloutPolicy<M>,
{
    pub fn new(models: &'a M, rollout: &'a R, params: PlannerParams) -> Self {
        Self {
            models,
            rollout,
            params,
            record_returns: false,
        }
    }

    /// Keep every backed-up return on its action edge (for inspection).
    pub fn recording_returns(mut self) -> Self {
        self.record_returns = true;
        self
    }

    pub fn params(&self) -> &PlannerParams {
        &self.params
    }

    pub fn plan(&self, b0: &ParticleBelief<M::State>, rng: &mut SimRng) -> ActionId {
        self.search(b0, rng)
            .best_action()
            .expect("at least one simulation explores a root action")
    }

    pub fn plan_with_diagnostics(
        &self,
        b0: &ParticleBelief<M::State>,
        rng: &mut SimRng,
    ) -> (ActionId, PlanDiagnostics) {
        let tree = self.search(b0, rng);
        let action = tree.best_action().expect("root has an explored action");
        (action, tree.diagnostics(action))
    }

    /// Runs the full search and returns the tree.
    pub fn search(&self, b0: &ParticleBelief<M::State>, rng: &mut SimRng) -> SearchTree<M::State> {
        let root = if b0.len() == self.params.tree_particles {
            b0.clone()
        } else {
            resample_to(b0, self.params.tree_particles, rng)
        };
        // The real episode has not ended, so the root is searched even when
        // the belief places all its mass in terminal states.
        let mut tree = SearchTree::new(root, false);
        for _ in 0..self.params.iterations {
            self.simulate(&mut tree, 0, self.params.max_depth, rng);
        }
        tree
    }

    fn simulate(&self, tree: &mut SearchTree<M::State>, node: usize, depth: usize, rng: &mut SimRng) -> f64 {
        if depth == 0 || tree.beliefs[node].terminal {
            return 0.0;
        }
        let p = &self.params;

        let tried = tree.beliefs[node].edges.len();
        if tried < self.models.spec().action_count()
            && widening_allows(tried, tree.beliefs[node].visits, p.action_k, p.action_alpha)
        {
            tree.add_edge(node, ActionId(tried));
        }

        let edge = {
            let b = &tree.beliefs[node];
            let picked = ucb_select(b.edges.iter().map(|&e| &tree.edges[e]), b.visits, p.exploration);
            b.edges[picked]
        };
        let action = tree.edges[edge].action;

        let total = if widening_allows(
            tree.edges[edge].children.len(),
            tree.edges[edge].visits,
            p.obs_k,
            p.obs_alpha,
        ) {
            let out = gen_pf(&tree.beliefs[node].belief, action, self.models, rng);
            let terminal = all_terminal(self.models, &out.belief);
            let leaf = if depth > 1 && !terminal {
                self.rollout.estimate(self.models, &out.belief, p.discount, rng)
            } else {
                0.0
            };
            tree.add_child(edge, out.belief, out.reward, terminal);
            out.reward + p.discount * leaf
        } else {
            let children = &tree.edges[edge].children;
            let (child, reward) = children[rng.random_range(0..children.len())];
            reward + p.discount * self.simulate(tree, child, depth - 1, rng)
        };

        tree.beliefs[node].visits += 1;
        let e = &mut tree.edges[edge];
        e.visits += 1;
        e.value += (total - e.value) / e.visits as f64;
        if self.record_returns {
            e.returns.push(total);
        }
        total
    }
}

fn all_terminal<M: ModelSuite>(models: &M, b: &ParticleBelief<M::State>) -> bool {
    b.particles()
        .iter()
        .zip(b.weights())
        .all(|(s, &w)| w == 0.0 || models.terminal(s) != crate::pomdp::Terminal::Continue)
}
