//! Online planning for partially observable navigation problems.
//!
//! The crate is organised around one closed loop:
//!
//! 1. a weighted particle belief is maintained by [`filter`] (predict with the
//!    transition model, reweight with the observation density, inject
//!    proposer particles with an exponentially decaying fraction and resample
//!    periodically),
//! 2. [`planner`] runs PFT-DPW Monte Carlo tree search over particle beliefs
//!    and returns one action per step,
//! 3. [`envs`] supplies the concrete problems (Floor Positioning, 2D
//!    Light-Dark and a discrete Tiger fixture) as analytic [`ModelSuite`]s.
//!
//! Everything the filter and the planner know about a problem goes through the
//! [`ModelSuite`] trait, so the same search code drives every environment.

pub mod envs;
pub mod error;
pub mod filter;
pub mod geometry;
pub mod map;
pub mod planner;
pub mod pomdp;
pub mod rng;

pub use error::ConfigError;
pub use filter::{FilterParams, ParticleBelief};
pub use geometry::{Rect, Segment, StateVec};
pub use map::{EnvMap, Region, RegionKind};
pub use planner::{Pft, PlannerParams};
pub use pomdp::{
    apply_action, step_env, ActionDef, ActionId, Coords, EpisodeEnd, ModelSuite, PomdpSpec, StepOutcome, Terminal,
};
pub use rng::SimRng;
