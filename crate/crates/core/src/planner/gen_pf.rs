use log::debug;
use rand::Rng;

use crate::filter::{resample_to, ParticleBelief};
use crate::pomdp::{ActionId, ModelSuite, Terminal};
use crate::rng::SimRng;

#[derive(Debug, Clone)]
pub struct GenPfOutcome<S, O> {
    pub belief: ParticleBelief<S>,
    pub obs: O,
    /// Belief-weighted expected reward of the step.
    pub reward: f64,
    /// Every likelihood was zero and the live weights were reset to uniform.
    pub degenerate: bool,
}

/// Generative particle-filter step from belief `b` under action `a`.
///
/// Particles already in a terminal state are frozen: they do not move, earn
/// nothing and keep their weight. The observation is generated from one live
/// particle drawn by weight, and only live particles are reweighted (their
/// total mass is preserved). The result is resampled to `b.len()` equal
/// weights when its effective sample size drops below half that.
pub fn gen_pf<M: ModelSuite>(
    b: &ParticleBelief<M::State>,
    a: ActionId,
    models: &M,
    rng: &mut SimRng,
) -> GenPfOutcome<M::State, M::Obs> {
    let m = b.len();
    let mut next = Vec::with_capacity(m);
    let mut live = Vec::with_capacity(m);
    let mut reward = 0.0;
    for (s, &w) in b.particles().iter().zip(b.weights()) {
        if models.terminal(s) != Terminal::Continue {
            next.push(s.clone());
            live.push(false);
            continue;
        }
        let s2 = models.transition(s, a, rng);
        reward += w * models.reward(s, a, &s2);
        live.push(models.terminal(&s2) == Terminal::Continue);
        next.push(s2);
    }

    let mut weights = b.weights().to_vec();
    let live_mass: f64 = weights.iter().zip(&live).filter(|(_, l)| **l).map(|(w, _)| w).sum();

    let source = pick_weighted(&weights, |i| live[i] || live_mass <= 0.0, rng);
    let obs = models.generate_obs(&next[source], rng);

    let mut degenerate = false;
    if live_mass > 0.0 {
        let mut total = 0.0;
        for i in 0..m {
            if live[i] {
                weights[i] *= models.obs_density(&obs, &next[i]);
                total += weights[i];
            }
        }
        if total > 0.0 && total.is_finite() {
            for i in (0..m).filter(|&i| live[i]) {
                weights[i] *= live_mass / total;
            }
        } else {
            debug!("gen_pf: all likelihoods zero, falling back to uniform live weights");
            degenerate = true;
            let n_live = live.iter().filter(|l| **l).count() as f64;
            for i in (0..m).filter(|&i| live[i]) {
                weights[i] = live_mass / n_live;
            }
        }
    }

    let mut belief = ParticleBelief::new(next, weights);
    if belief.effective_sample_size() < m as f64 / 2.0 {
        belief = resample_to(&belief, m, rng);
    }
    GenPfOutcome {
        belief,
        obs,
        reward,
        degenerate,
    }
}

/// Draws an index proportional to `weights` among indices accepted by `keep`.
fn pick_weighted(weights: &[f64], keep: impl Fn(usize) -> bool, rng: &mut SimRng) -> usize {
    let total: f64 = (0..weights.len()).filter(|&i| keep(i)).map(|i| weights[i]).sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if !keep(i) || w <= 0.0 {
            continue;
        }
        last = i;
        if u < w {
            return i;
        }
        u -= w;
    }
    last
}

pub(crate) fn pick_index(weights: &[f64], rng: &mut SimRng) -> usize {
    pick_weighted(weights, |_| true, rng)
}
