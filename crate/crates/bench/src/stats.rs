//! Seed-level aggregation and the significance tests used by the acceptance suite.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::episode::EpisodeRecord;

/// Mean of per-seed means with the standard error across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metric {
    pub mean: f64,
    pub std_error: f64,
    /// Number of seed means that entered the estimate.
    pub n: usize,
}

impl Metric {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std_error, n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Unconditional mean episode reward.
    pub reward: f64,
    pub trap_entries: f64,
    pub plan_time_s: f64,
    pub filter_time_s: f64,
    pub degeneracy_events: usize,
    /// Means over successful episodes only; absent when the seed had none.
    pub success_steps: Option<f64>,
    pub success_reward: Option<f64>,
    pub success_particle_distance: Option<f64>,
}

impl SeedSummary {
    pub fn of(seed: u64, records: &[&EpisodeRecord]) -> Self {
        let n = records.len().max(1) as f64;
        let mean = |f: &dyn Fn(&EpisodeRecord) -> f64| records.iter().map(|r| f(r)).sum::<f64>() / n;
        let won: Vec<&&EpisodeRecord> = records.iter().filter(|r| r.success).collect();
        let won_mean = |f: &dyn Fn(&EpisodeRecord) -> f64| {
            (!won.is_empty()).then(|| won.iter().map(|r| f(r)).sum::<f64>() / won.len() as f64)
        };
        Self {
            seed,
            episodes: records.len(),
            successes: won.len(),
            success_rate: won.len() as f64 / n,
            reward: mean(&|r| r.reward),
            trap_entries: mean(&|r| r.trap_entries as f64),
            plan_time_s: mean(&|r| r.mean_plan_time_s),
            filter_time_s: mean(&|r| r.mean_filter_time_s),
            degeneracy_events: records.iter().map(|r| r.degeneracy_events).sum(),
            success_steps: won_mean(&|r| r.steps as f64),
            success_reward: won_mean(&|r| r.reward),
            success_particle_distance: won_mean(&|r| r.mean_particle_distance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub planner: String,
    pub seeds: usize,
    pub episodes_per_seed: usize,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: Metric,
    pub reward: Metric,
    pub trap_entries: Metric,
    pub plan_time_s: Metric,
    pub filter_time_s: Metric,
    /// Success-conditioned metrics.
    pub steps: Metric,
    pub success_reward: Metric,
    pub particle_distance: Metric,
    pub degeneracy_events: usize,
    pub per_seed: Vec<SeedSummary>,
}

impl RunSummary {
    /// `records` must be grouped by seed, in seed-ladder order.
    pub fn of(scenario: &str, planner: &str, seeds: &[u64], records: &[EpisodeRecord]) -> Self {
        let per_seed: Vec<SeedSummary> = seeds
            .iter()
            .map(|&s| {
                let rs: Vec<&EpisodeRecord> = records.iter().filter(|r| r.seed == s).collect();
                SeedSummary::of(s, &rs)
            })
            .collect();
        let over = |f: &dyn Fn(&SeedSummary) -> f64| Metric::of(&per_seed.iter().map(f).collect::<Vec<_>>());
        let over_some =
            |f: &dyn Fn(&SeedSummary) -> Option<f64>| Metric::of(&per_seed.iter().filter_map(f).collect::<Vec<_>>());
        Self {
            scenario: scenario.to_string(),
            planner: planner.to_string(),
            seeds: seeds.len(),
            episodes_per_seed: per_seed.first().map_or(0, |s| s.episodes),
            episodes: records.len(),
            successes: records.iter().filter(|r| r.success).count(),
            success_rate: over(&|s| s.success_rate),
            reward: over(&|s| s.reward),
            trap_entries: over(&|s| s.trap_entries),
            plan_time_s: over(&|s| s.plan_time_s),
            filter_time_s: over(&|s| s.filter_time_s),
            steps: over_some(&|s| s.success_steps),
            success_reward: over_some(&|s| s.success_reward),
            particle_distance: over_some(&|s| s.success_particle_distance),
            degeneracy_events: per_seed.iter().map(|s| s.degeneracy_events).sum(),
            per_seed,
        }
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// One-sided Welch t-test of `mean(a) > mean(b)`; returns the p-value.
pub fn welch_greater(a: &[f64], b: &[f64]) -> f64 {
    assert!(a.len() > 1 && b.len() > 1, "Welch test needs two samples per group");
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se = (sa + sb).sqrt();
    if se == 0.0 {
        return if ma > mb { 0.0 } else { 1.0 };
    }
    let t = (ma - mb) / se;
    let df = (sa + sb).powi(2) / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    1.0 - dist.cdf(t)
}

/// One-sided pooled two-proportion z-test of `p1 > p2`; returns the p-value.
pub fn two_proportion_greater(s1: usize, n1: usize, s2: usize, n2: usize) -> f64 {
    let (p1, p2) = (s1 as f64 / n1 as f64, s2 as f64 / n2 as f64);
    let pooled = (s1 + s2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return if p1 > p2 { 0.0 } else { 1.0 };
    }
    let z = (p1 - p2) / se;
    1.0 - Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}
