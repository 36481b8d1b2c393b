//! CSV, JSON summary and trace writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use vts_core::EnvMap;

use crate::episode::EpisodeRecord;
use crate::render::render_trajectory;
use crate::stats::RunSummary;
use crate::BenchError;

#[derive(Serialize)]
struct CsvRow {
    seed: u64,
    episode: usize,
    success: bool,
    steps: usize,
    reward: f64,
    mean_particle_distance: f64,
    mean_plan_time_s: f64,
    mean_filter_time_s: f64,
    trap_entries: usize,
    degeneracy_events: usize,
}

/// One row per episode, in suite order.
pub fn write_csv<W: Write>(records: &[EpisodeRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            seed: r.seed,
            episode: r.episode,
            success: r.success,
            steps: r.steps,
            reward: r.reward,
            mean_particle_distance: r.mean_particle_distance,
            mean_plan_time_s: r.mean_plan_time_s,
            mean_filter_time_s: r.mean_filter_time_s,
            trap_entries: r.trap_entries,
            degeneracy_events: r.degeneracy_events,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(summary: &RunSummary, mut out: W) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(&mut out, summary)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Per-episode JSON traces, SVG plots for episodes `map_of` returns a map for,
/// and the planner diagnostics as JSON lines.
pub fn write_traces<F>(dir: &Path, records: &[EpisodeRecord], map_of: F) -> Result<(), BenchError>
where
    F: Fn(&EpisodeRecord) -> Result<Option<EnvMap>, BenchError>,
{
    fs::create_dir_all(dir)?;
    for r in records {
        let stem = format!("seed{}_ep{}", r.seed, r.episode);
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_vec(r)?)?;
        if let Some(map) = map_of(r)? {
            fs::write(dir.join(format!("{stem}.svg")), render_trajectory(r, &map))?;
        }
        if !r.diagnostics.is_empty() {
            let mut f = fs::File::create(dir.join(format!("{stem}_tree.jsonl")))?;
            for d in &r.diagnostics {
                serde_json::to_writer(&mut f, d)?;
                f.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}
