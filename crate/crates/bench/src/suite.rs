//! Seeded suites: a scenario, a planner and a seed ladder.

use std::path::PathBuf;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use vts_core::envs::lightdark::spawn_test_traps;
use vts_core::envs::{EnvFile, FloorConfig, FloorEnv, LightDarkConfig, LightDarkEnv, Tiger};
use vts_core::planner::{CollapseRollout, ZeroRollout};
use vts_core::rng::{derive_seed, stream, Stream};
use vts_core::{ConfigError, EnvMap, FilterParams, ModelSuite, PlannerParams, StateVec};

use crate::episode::{run_episode, EpisodeOptions, EpisodeRecord};
use crate::policy::{PftPolicy, Policy, RandomPolicy, StraightToGoal};
use crate::stats::RunSummary;
use crate::BenchError;

/// Spacing of the seed ladder: `seed_i = base_seed + i * SEED_STRIDE`.
pub const SEED_STRIDE: u64 = 1_000_003;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Floor,
    Lightdark,
    Tiger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Pft,
    Straight,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Ablation {
    None,
    Traps,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TigerSettings {
    pub discount: f64,
    pub max_steps: usize,
}

impl Default for TigerSettings {
    fn default() -> Self {
        Self {
            discount: 0.95,
            max_steps: 50,
        }
    }
}

/// Everything a suite run depends on. The JSON form mirrors the CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub env: EnvKind,
    pub planner: PlannerKind,
    pub ablation: Ablation,
    pub seeds: usize,
    pub episodes: usize,
    pub base_seed: u64,
    pub map: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub tree_diag: bool,
    pub timing: bool,
    pub pft: PlannerParams,
    pub filter: FilterParams,
    pub floor: FloorConfig,
    pub lightdark: LightDarkConfig,
    pub tiger: TigerSettings,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            env: EnvKind::Floor,
            planner: PlannerKind::Pft,
            ablation: Ablation::None,
            seeds: 10,
            episodes: 20,
            base_seed: 0,
            map: None,
            out: None,
            summary: None,
            trace: None,
            tree_diag: false,
            timing: true,
            pft: PlannerParams::default(),
            filter: FilterParams::default(),
            floor: FloorConfig::default(),
            lightdark: LightDarkConfig::default(),
            tiger: TigerSettings::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn seed_ladder(&self) -> Vec<u64> {
        (0..self.seeds as u64)
            .map(|i| self.base_seed.wrapping_add(i.wrapping_mul(SEED_STRIDE)))
            .collect()
    }

    /// `floor`, `lightdark`, `lightdark+traps`, `lightdark+mismatch` or `tiger`.
    pub fn scenario(&self) -> String {
        let env = match self.env {
            EnvKind::Floor => "floor",
            EnvKind::Lightdark => "lightdark",
            EnvKind::Tiger => "tiger",
        };
        match self.ablation {
            Ablation::None => env.to_string(),
            Ablation::Traps => format!("{env}+traps"),
            Ablation::Mismatch => format!("{env}+mismatch"),
        }
    }

    pub fn planner_name(&self) -> &'static str {
        match self.planner {
            PlannerKind::Pft => "pft",
            PlannerKind::Straight => "straight",
            PlannerKind::Random => "random",
        }
    }

    /// Checks everything that can fail before any episode starts.
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.seeds == 0 || self.episodes == 0 {
            return Err(ConfigError::param("seeds", "seeds and episodes must be positive").into());
        }
        self.filter.validate()?;
        self.pft.validate()?;
        if self.ablation != Ablation::None && self.env != EnvKind::Lightdark {
            return Err(BenchError::Unsupported(format!(
                "ablation {:?} only applies to lightdark",
                self.ablation
            )));
        }
        match self.env {
            EnvKind::Floor => {
                self.floor_env()?;
            }
            EnvKind::Lightdark => {
                self.lightdark_env()?;
            }
            EnvKind::Tiger => {
                if self.planner == PlannerKind::Straight {
                    return Err(BenchError::Unsupported(
                        "the straight-to-goal planner needs a navigation environment".into(),
                    ));
                }
                Tiger::new(self.tiger.discount, self.tiger.max_steps)?;
            }
        }
        Ok(())
    }

    fn env_file(&self) -> Result<Option<EnvFile>, ConfigError> {
        self.map.as_deref().map(EnvFile::load).transpose()
    }

    pub fn floor_env(&self) -> Result<FloorEnv, ConfigError> {
        match self.env_file()? {
            Some(file) => file.floor_env(self.floor.clone()),
            None => FloorEnv::new(self.floor.clone()),
        }
    }

    pub fn lightdark_env(&self) -> Result<LightDarkEnv, ConfigError> {
        match self.env_file()? {
            Some(file) => file.lightdark_env(self.lightdark.clone()),
            None => LightDarkEnv::new(self.lightdark.clone()),
        }
    }

    fn options(&self) -> EpisodeOptions {
        EpisodeOptions {
            timing: self.timing,
            snapshots: self.trace.is_some(),
            tree_diag: self.tree_diag,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub records: Vec<EpisodeRecord>,
    pub summary: RunSummary,
}

/// Seed of episode `episode` under ladder seed `seed`.
pub fn episode_seed(seed: u64, episode: usize) -> u64 {
    derive_seed(seed, episode as u64)
}

/// Runs every (seed, episode) pair in parallel and aggregates in ladder order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutput, BenchError> {
    cfg.validate()?;
    let seeds = cfg.seed_ladder();
    let jobs: Vec<(u64, usize)> = seeds
        .iter()
        .flat_map(|&s| (0..cfg.episodes).map(move |e| (s, e)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(seed, episode)| run_one(cfg, seed, episode))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = RunSummary::of(&cfg.scenario(), cfg.planner_name(), &seeds, &records);
    Ok(SuiteOutput { records, summary })
}

/// One episode of the configured scenario. The record carries the ladder
/// seed; the episode's own randomness comes from [`episode_seed`].
pub fn run_one(cfg: &SuiteConfig, seed: u64, episode: usize) -> Result<EpisodeRecord, BenchError> {
    let ep_seed = episode_seed(seed, episode);
    let mut record = match cfg.env {
        EnvKind::Floor => {
            let env = cfg.floor_env()?;
            run_nav(cfg, &env, &env, env.map(), ep_seed, episode)?
        }
        EnvKind::Lightdark => {
            let (world, agent) = lightdark_pair(cfg, ep_seed)?;
            run_nav(cfg, &world, &agent, agent.map(), ep_seed, episode)?
        }
        EnvKind::Tiger => {
            let tiger = Tiger::new(cfg.tiger.discount, cfg.tiger.max_steps)?;
            match cfg.planner {
                PlannerKind::Pft => {
                    let mut p = PftPolicy::new(ZeroRollout, cfg.pft.clone()).with_diagnostics(cfg.tree_diag);
                    run_episode(&tiger, &tiger, &mut p, &cfg.filter, ep_seed, episode, cfg.options())?
                }
                PlannerKind::Random => run_episode(
                    &tiger,
                    &tiger,
                    &mut RandomPolicy,
                    &cfg.filter,
                    ep_seed,
                    episode,
                    cfg.options(),
                )?,
                PlannerKind::Straight => {
                    return Err(BenchError::Unsupported(
                        "the straight-to-goal planner needs a navigation environment".into(),
                    ))
                }
            }
        }
    };
    record.seed = seed;
    Ok(record)
}

/// Light-Dark world and agent models for one episode of the configured ablation.
fn lightdark_pair(cfg: &SuiteConfig, ep_seed: u64) -> Result<(LightDarkEnv, LightDarkEnv), ConfigError> {
    let agent = cfg.lightdark_env()?;
    match cfg.ablation {
        Ablation::None => Ok((agent.clone(), agent)),
        Ablation::Traps => {
            let traps = spawn_test_traps(agent.config(), &mut stream(ep_seed, Stream::Traps));
            let agent = agent.with_traps(traps)?;
            Ok((agent.clone(), agent))
        }
        Ablation::Mismatch => {
            let std = agent.config().test_dark_std;
            Ok((agent.clone().with_generator_dark_std(std)?, agent))
        }
    }
}

/// Map the agent saw in the episode behind `record`, including any traps
/// spawned for it. `None` for environments without a map.
pub fn episode_map(cfg: &SuiteConfig, record: &EpisodeRecord) -> Result<Option<EnvMap>, ConfigError> {
    Ok(match cfg.env {
        EnvKind::Floor => Some(cfg.floor_env()?.map().clone()),
        EnvKind::Lightdark => {
            let (_, agent) = lightdark_pair(cfg, episode_seed(record.seed, record.episode))?;
            Some(agent.map().clone())
        }
        EnvKind::Tiger => None,
    })
}

fn run_nav<M: ModelSuite<State = StateVec>>(
    cfg: &SuiteConfig,
    world: &M,
    agent: &M,
    map: &EnvMap,
    ep_seed: u64,
    episode: usize,
) -> Result<EpisodeRecord, BenchError> {
    let opts = cfg.options();
    let run = |policy: &mut dyn PolicyObj<M>| policy.run(world, agent, &cfg.filter, ep_seed, episode, opts);
    match cfg.planner {
        PlannerKind::Pft => {
            let rollout = CollapseRollout::new(map, agent.spec());
            let mut p = PftPolicy::new(rollout, cfg.pft.clone()).with_diagnostics(cfg.tree_diag);
            run(&mut p)
        }
        PlannerKind::Straight => run(&mut StraightToGoal { map }),
        PlannerKind::Random => run(&mut RandomPolicy),
    }
}

/// Object-safe shim so [`run_nav`] can dispatch on the planner kind once.
trait PolicyObj<M: ModelSuite> {
    fn run(
        &mut self,
        world: &M,
        agent: &M,
        filter: &FilterParams,
        seed: u64,
        episode: usize,
        opts: EpisodeOptions,
    ) -> Result<EpisodeRecord, BenchError>;
}

impl<M: ModelSuite, P: Policy<M>> PolicyObj<M> for P {
    fn run(
        &mut self,
        world: &M,
        agent: &M,
        filter: &FilterParams,
        seed: u64,
        episode: usize,
        opts: EpisodeOptions,
    ) -> Result<EpisodeRecord, BenchError> {
        Ok(run_episode(world, agent, self, filter, seed, episode, opts)?)
    }
}
