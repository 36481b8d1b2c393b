//! Benchmark harness for the planners in `vts_core`.
//!
//! A suite runs `seeds x episodes` closed-loop episodes of one scenario in
//! parallel, writes a CSV row per episode and a JSON summary whose metrics are
//! means of per-seed means with standard errors across seeds.

pub mod episode;
pub mod output;
pub mod policy;
pub mod render;
pub mod stats;
pub mod suite;

use thiserror::Error;

pub use episode::{run_episode, EpisodeOptions, EpisodeRecord};
pub use stats::{Metric, RunSummary};
pub use suite::{run_suite, Ablation, EnvKind, PlannerKind, SuiteConfig, SuiteOutput};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] vts_core::ConfigError),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Whether the error was caused by the configuration rather than by I/O.
    pub fn is_config(&self) -> bool {
        matches!(self, BenchError::Config(_) | BenchError::Unsupported(_))
    }
}
