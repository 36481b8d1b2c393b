//! Weighted particle belief and its update.
//!
//! One update runs predict, reweight, propose and (periodically) resample:
//!
//! * every particle is advanced with the transition model,
//! * weights are multiplied by the observation density,
//! * the `floor(K * p * decay^n)` lowest-weight particles are replaced with
//!   proposer draws for the new observation, each taking the current mean
//!   weight,
//! * weights are renormalised and, every `resample_period` updates, the
//!   belief is systematically resampled to equal weights.
//!
//! When every weight underflows to zero the belief is rebuilt from `K`
//! proposer draws.

use log::debug;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::pomdp::{ActionId, Coords, ModelSuite};
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// Particle count `K`.
    pub particles: usize,
    /// Nominal fraction `p` of particles replaced by proposals.
    pub proposal_fraction: f64,
    /// Per-step decay `gamma_d` of the proposal fraction.
    pub proposal_decay: f64,
    /// Resample after every `resample_period`-th update.
    pub resample_period: usize,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            particles: 100,
            proposal_fraction: 0.3,
            proposal_decay: 0.9,
            resample_period: 3,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.particles == 0 {
            return Err(ConfigError::param("particles", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.proposal_fraction) {
            return Err(ConfigError::param("proposal_fraction", "must lie in [0, 1]"));
        }
        if !(self.proposal_decay > 0.0 && self.proposal_decay <= 1.0) {
            return Err(ConfigError::param("proposal_decay", "must lie in (0, 1]"));
        }
        if self.resample_period == 0 {
            return Err(ConfigError::param("resample_period", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of particles replaced by proposals at episode step `step`.
    pub fn proposal_count(&self, step: usize) -> usize {
        let exact = self.particles as f64
            * self.proposal_fraction
            * self.proposal_decay.powi(step.min(i32::MAX as usize) as i32);
        // Products like 100 * 0.3 * 0.9 land a few ulps below an integer.
        let count = (exact + 1e-9).floor() as usize;
        count.min(self.particles)
    }
}

/// `b_t ~ {s^(k), w^(k)}`: particles with normalised weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleBelief<S> {
    particles: Vec<S>,
    weights: Vec<f64>,
    step_index: usize,
}

impl<S: Clone> ParticleBelief<S> {
    /// Builds a belief from particles and unnormalised weights.
    ///
    /// Panics if the lengths differ, the set is empty, or the weights are
    /// negative, non-finite or all zero.
    pub fn new(particles: Vec<S>, weights: Vec<f64>) -> Self {
        assert_eq!(particles.len(), weights.len(), "particle/weight length mismatch");
        assert!(!particles.is_empty(), "belief needs at least one particle");
        assert!(
            weights.iter().all(|w| w.is_finite() && *w >= 0.0),
            "weights must be finite and non-negative"
        );
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "weights must not all be zero");
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self {
            particles,
            weights,
            step_index: 0,
        }
    }

    pub fn uniform(particles: Vec<S>) -> Self {
        let w = vec![1.0 / particles.len() as f64; particles.len()];
        Self::new(particles, w)
    }

    pub fn with_step_index(mut self, step_index: usize) -> Self {
        self.step_index = step_index;
        self
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[S] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

impl<S: Coords> ParticleBelief<S> {
    /// Weighted mean of the particle coordinates.
    pub fn mean(&self) -> Vec<f64> {
        let dim = self.particles[0].dim();
        let mut mean = vec![0.0; dim];
        for (p, w) in self.particles.iter().zip(&self.weights) {
            for (i, m) in mean.iter_mut().enumerate() {
                *m += w * p.coord(i);
            }
        }
        mean
    }

    pub fn snapshot(&self) -> BeliefSnapshot {
        BeliefSnapshot {
            particles: self.particles.iter().map(Coords::to_vec).collect(),
            weights: self.weights.clone(),
            mean: self.mean(),
            step_index: self.step_index,
        }
    }
}

/// JSON trace record of a belief.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub particles: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub mean: Vec<f64>,
    pub step_index: usize,
}

pub fn belief_mean<S: Coords>(b: &ParticleBelief<S>) -> Vec<f64> {
    b.mean()
}

/// Euclidean distance between the belief's weighted mean and `truth`.
pub fn particle_distance<S: Coords>(b: &ParticleBelief<S>, truth: &S) -> f64 {
    b.mean()
        .iter()
        .enumerate()
        .map(|(i, m)| (m - truth.coord(i)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// What happened during one [`update`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UpdateReport {
    pub proposed: usize,
    pub resampled: bool,
    pub degenerate: bool,
}

/// Samples `K` particles from the problem's start distribution.
pub fn init_belief<M: ModelSuite>(
    models: &M,
    params: &FilterParams,
    rng: &mut SimRng,
) -> Result<ParticleBelief<M::State>, ConfigError> {
    params.validate()?;
    let particles = (0..params.particles)
        .map(|_| models.sample_initial_state(rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParticleBelief::uniform(particles))
}

/// Advances the belief by action `a` and conditions it on observation `o`.
pub fn update<M: ModelSuite>(
    belief: &mut ParticleBelief<M::State>,
    a: ActionId,
    o: &M::Obs,
    models: &M,
    params: &FilterParams,
    rng: &mut SimRng,
) -> UpdateReport {
    let n = belief.step_index;
    let k = belief.len();
    let mut report = UpdateReport::default();

    for (p, w) in belief.particles.iter_mut().zip(belief.weights.iter_mut()) {
        *p = models.transition(p, a, rng);
        *w *= models.obs_density(o, p);
    }

    let total: f64 = belief.weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        debug!("filter degeneracy at step {n}: reinitialising from the proposer");
        belief.particles = (0..k).map(|_| models.propose(o, rng)).collect();
        belief.weights = vec![1.0 / k as f64; k];
        belief.step_index += 1;
        report.degenerate = true;
        report.proposed = k;
        return report;
    }

    let proposed = params.proposal_count(n).min(k);
    if proposed > 0 {
        let mean_weight = total / k as f64;
        let mut order: Vec<usize> = (0..k).collect();
        // Stable sort: ties resolved by particle index.
        order.sort_by(|&i, &j| belief.weights[i].total_cmp(&belief.weights[j]));
        for &i in order.iter().take(proposed) {
            belief.particles[i] = models.propose(o, rng);
            belief.weights[i] = mean_weight;
        }
    }
    report.proposed = proposed;
    normalize(&mut belief.weights);

    if n % params.resample_period == params.resample_period - 1 {
        *belief = systematic_resample(belief, rng).with_step_index(n);
        report.resampled = true;
    }
    belief.step_index = n + 1;
    report
}

fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
}

/// Systematic selection: `n` evenly spaced points `(offset + i) / n` on the
/// weight CDF. `offset` must lie in `[0, 1)`.
pub fn systematic_indices(weights: &[f64], n: usize, offset: f64) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut cumulative = weights[0] / total;
    let mut j = 0;
    for i in 0..n {
        let u = (offset + i as f64) / n as f64;
        while u >= cumulative && j + 1 < weights.len() {
            j += 1;
            cumulative += weights[j] / total;
        }
        out.push(j);
    }
    out
}

/// Resamples to the same particle count with equal weights.
pub fn systematic_resample<S: Clone>(b: &ParticleBelief<S>, rng: &mut SimRng) -> ParticleBelief<S> {
    resample_to(b, b.len(), rng)
}

/// Resamples to `n` equal-weight particles.
pub fn resample_to<S: Clone>(b: &ParticleBelief<S>, n: usize, rng: &mut SimRng) -> ParticleBelief<S> {
    let offset: f64 = rng.random();
    let particles = systematic_indices(&b.weights, n, offset)
        .into_iter()
        .map(|i| b.particles[i].clone())
        .collect();
    ParticleBelief::uniform(particles).with_step_index(b.step_index)
}
