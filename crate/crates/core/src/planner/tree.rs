use crate::filter::ParticleBelief;
use crate::pomdp::ActionId;

use super::{PlanDiagnostics, RootActionStats};

#[derive(Debug, Clone)]
pub struct BeliefNode<S> {
    pub belief: ParticleBelief<S>,
    /// `N(b)`; starts at 1 when the node is created.
    pub visits: u32,
    /// Action edges, in action-table order.
    pub edges: Vec<usize>,
    /// Every particle with weight sits in a terminal state.
    pub terminal: bool,
}

#[derive(Debug, Clone)]
pub struct ActionEdge {
    pub action: ActionId,
    /// `N(b, a)`.
    pub visits: u32,
    /// Running mean `Q(b, a)` of backed-up returns.
    pub value: f64,
    /// Belief children with the expected reward of reaching them.
    pub children: Vec<(usize, f64)>,
    /// Backed-up returns, kept only when the planner records them.
    pub returns: Vec<f64>,
}

/// Arena of belief nodes and action edges; node 0 is the root.
#[derive(Debug, Clone)]
pub struct SearchTree<S> {
    pub beliefs: Vec<BeliefNode<S>>,
    pub edges: Vec<ActionEdge>,
}

impl<S: Clone> SearchTree<S> {
    pub fn new(root: ParticleBelief<S>, terminal: bool) -> Self {
        Self {
            beliefs: vec![BeliefNode {
                belief: root,
                visits: 1,
                edges: Vec::new(),
                terminal,
            }],
            edges: Vec::new(),
        }
    }

    pub fn root(&self) -> &BeliefNode<S> {
        &self.beliefs[0]
    }

    pub(crate) fn add_edge(&mut self, node: usize, action: ActionId) -> usize {
        let id = self.edges.len();
        self.edges.push(ActionEdge {
            action,
            visits: 0,
            value: 0.0,
            children: Vec::new(),
            returns: Vec::new(),
        });
        self.beliefs[node].edges.push(id);
        id
    }

    pub(crate) fn add_child(&mut self, edge: usize, belief: ParticleBelief<S>, reward: f64, terminal: bool) -> usize {
        let id = self.beliefs.len();
        self.beliefs.push(BeliefNode {
            belief,
            visits: 1,
            edges: Vec::new(),
            terminal,
        });
        self.edges[edge].children.push((id, reward));
        id
    }

    /// Root edges with at least one visit.
    pub fn root_edges(&self) -> impl Iterator<Item = &ActionEdge> + '_ {
        self.root()
            .edges
            .iter()
            .map(|&e| &self.edges[e])
            .filter(|e| e.visits > 0)
    }

    /// `argmax_a Q(b0, a)` over visited root actions; ties go to the lowest id.
    pub fn best_action(&self) -> Option<ActionId> {
        self.best_edge().map(|e| e.action)
    }

    fn best_edge(&self) -> Option<&ActionEdge> {
        let mut best: Option<&ActionEdge> = None;
        for e in self.root_edges() {
            match best {
                Some(b) if e.value > b.value || (e.value == b.value && e.action < b.action) => best = Some(e),
                None => best = Some(e),
                _ => {}
            }
        }
        best
    }

    /// `Q` of the chosen root action.
    pub fn root_value(&self) -> Option<f64> {
        self.best_edge().map(|e| e.value)
    }

    pub fn diagnostics(&self, action: ActionId) -> PlanDiagnostics {
        PlanDiagnostics {
            action,
            belief_nodes: self.beliefs.len(),
            action_edges: self.edges.len(),
            root: self
                .root()
                .edges
                .iter()
                .map(|&e| RootActionStats {
                    action: self.edges[e].action,
                    visits: self.edges[e].visits,
                    value: self.edges[e].value,
                })
                .collect(),
        }
    }
}

/// Widening threshold `k * N^alpha`.
pub fn widening_limit(visits: u32, k: f64, alpha: f64) -> f64 {
    k * (visits as f64).powf(alpha)
}

/// A new child may be added while `children <= k * N^alpha`, evaluated with
/// the visit count before the current simulation is backed up.
pub fn widening_allows(children: usize, visits: u32, k: f64, alpha: f64) -> bool {
    if visits == 0 {
        return children == 0;
    }
    children as f64 <= widening_limit(visits, k, alpha)
}

pub fn ucb_score(value: f64, visits: u32, parent_visits: u32, c: f64) -> f64 {
    if visits == 0 {
        return f64::INFINITY;
    }
    value + c * ((parent_visits as f64).ln() / visits as f64).sqrt()
}

/// Index of the edge maximising `Q + c * sqrt(ln N(b) / N(b, a))`. Unvisited
/// edges score infinity; ties go to the earliest edge (lowest action id).
pub fn ucb_select<'e>(edges: impl IntoIterator<Item = &'e ActionEdge>, parent_visits: u32, c: f64) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, e) in edges.into_iter().enumerate() {
        let score = ucb_score(e.value, e.visits, parent_visits, c);
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(action: usize, visits: u32, value: f64) -> ActionEdge {
        ActionEdge {
            action: ActionId(action),
            visits,
            value,
            children: Vec::new(),
            returns: Vec::new(),
        }
    }

    #[test]
    fn unvisited_edge_first() {
        let edges = [edge(0, 4, 50.0), edge(1, 0, -10.0), edge(2, 0, 0.0)];
        assert_eq!(ucb_select(&edges, 5, 10.0), 1);
    }

    #[test]
    fn fewer_visits_win_on_equal_value() {
        let edges = [edge(0, 3, 1.0), edge(1, 1, 1.0)];
        assert_eq!(ucb_select(&edges, 4, 10.0), 1);
    }

    #[test]
    fn value_breaks_equal_bonus() {
        let edges = [edge(0, 1, 10.0), edge(1, 1, 0.0)];
        let bonus = 10.0 * 2f64.ln().sqrt();
        assert!((ucb_score(10.0, 1, 2, 10.0) - (10.0 + bonus)).abs() < 1e-12);
        assert!((ucb_score(0.0, 1, 2, 10.0) - bonus).abs() < 1e-12);
        assert_eq!(ucb_select(&edges, 2, 10.0), 0);
    }

    #[test]
    fn widening_thresholds() {
        // Fresh node: N(b) = 1 allows up to three actions.
        assert_eq!(widening_limit(1, 3.0, 0.25), 3.0);
        assert!(widening_allows(0, 1, 3.0, 0.25));
        // 4 * 16^0.25 = 8 observation children.
        assert_eq!(widening_limit(16, 4.0, 0.25), 8.0);
        assert!(widening_allows(8, 16, 4.0, 0.25));
        assert!(!widening_allows(9, 16, 4.0, 0.25));
        // An edge that has never been backed up takes exactly one child.
        assert!(widening_allows(0, 0, 4.0, 0.25));
        assert!(!widening_allows(1, 0, 4.0, 0.25));
    }
}
