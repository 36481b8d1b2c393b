//! One closed-loop episode: plan, act, observe, update the belief.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use vts_core::filter::{init_belief, particle_distance, update, BeliefSnapshot};
use vts_core::planner::PlanDiagnostics;
use vts_core::rng::{stream, Stream};
use vts_core::{step_env, ConfigError, Coords, EpisodeEnd, FilterParams, ModelSuite};

use crate::policy::Policy;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeOptions {
    /// Measure wall-clock time. When off every time field is zero, which makes
    /// outputs byte-reproducible.
    pub timing: bool,
    /// Keep a belief snapshot before every plan call.
    pub snapshots: bool,
    /// Keep the planner's root statistics for every plan call.
    pub tree_diag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub episode: usize,
    pub success: bool,
    pub end: EpisodeEnd,
    pub steps: usize,
    pub reward: f64,
    /// Mean over steps of the distance between the belief mean and the true
    /// state, measured after each filter update.
    pub mean_particle_distance: f64,
    pub mean_plan_time_s: f64,
    pub mean_filter_time_s: f64,
    pub trap_entries: usize,
    pub degeneracy_events: usize,
    /// True states `s_0 .. s_T`.
    pub trajectory: Vec<Vec<f64>>,
    /// Belief means `b_0 .. b_T`.
    pub belief_means: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<BeliefSnapshot>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<PlanDiagnostics>,
}

/// Runs one episode. `world` generates the true dynamics and observations;
/// `agent` is what the filter and the policy see. The two differ only in
/// ablations that change the world at test time.
pub fn run_episode<M, P>(
    world: &M,
    agent: &M,
    policy: &mut P,
    filter: &FilterParams,
    seed: u64,
    episode: usize,
    opts: EpisodeOptions,
) -> Result<EpisodeRecord, ConfigError>
where
    M: ModelSuite,
    P: Policy<M>,
{
    filter.validate()?;
    agent.spec().validate()?;
    let mut env_rng = stream(seed, Stream::Environment);
    let mut filter_rng = stream(seed, Stream::Filter);
    let mut plan_rng = stream(seed, Stream::Planner);
    let mut init_rng = stream(seed, Stream::Initial);

    let mut state = world.sample_initial_state(&mut init_rng)?;
    let mut belief = init_belief(agent, filter, &mut filter_rng)?;

    let mut record = EpisodeRecord {
        seed,
        episode,
        success: false,
        end: EpisodeEnd::StepLimit,
        steps: 0,
        reward: 0.0,
        mean_particle_distance: 0.0,
        mean_plan_time_s: 0.0,
        mean_filter_time_s: 0.0,
        trap_entries: 0,
        degeneracy_events: 0,
        trajectory: vec![state.to_vec()],
        belief_means: vec![belief.mean()],
        actions: Vec::new(),
        snapshots: Vec::new(),
        diagnostics: Vec::new(),
    };
    let mut plan_time = 0.0;
    let mut filter_time = 0.0;
    let mut distance = 0.0;

    let max_steps = world.spec().max_steps;
    for t in 0..max_steps {
        if opts.snapshots {
            record.snapshots.push(belief.snapshot());
        }
        let clock = opts.timing.then(Instant::now);
        let action = policy.act(agent, &belief, &mut plan_rng);
        if let Some(c) = clock {
            plan_time += c.elapsed().as_secs_f64();
        }
        if opts.tree_diag {
            if let Some(d) = policy.take_diagnostics() {
                record.diagnostics.push(d);
            }
        }

        let out = step_env(world, &state, action, t, &mut env_rng);
        record.reward += out.reward;
        if world.is_trap(&out.next) {
            record.trap_entries += 1;
        }

        let clock = opts.timing.then(Instant::now);
        let report = update(&mut belief, action, &out.obs, agent, filter, &mut filter_rng);
        if let Some(c) = clock {
            filter_time += c.elapsed().as_secs_f64();
        }
        if report.degenerate {
            record.degeneracy_events += 1;
        }
        distance += particle_distance(&belief, &out.next);

        state = out.next;
        record.steps = t + 1;
        record.actions.push(action.0);
        record.trajectory.push(state.to_vec());
        record.belief_means.push(belief.mean());

        if let Some(end) = out.done {
            record.end = end;
            break;
        }
    }

    record.success = record.end == EpisodeEnd::Success;
    if record.steps > 0 {
        let n = record.steps as f64;
        record.mean_particle_distance = distance / n;
        record.mean_plan_time_s = plan_time / n;
        record.mean_filter_time_s = filter_time / n;
    }
    Ok(record)
}
