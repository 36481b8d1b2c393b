//! Hand-written SVG trajectory plots.

use std::fmt::Write;

use vts_core::{EnvMap, RegionKind};

use crate::episode::EpisodeRecord;

const SCALE: f64 = 400.0;
/// Particle clouds drawn per trace, evenly spaced over the snapshots.
const CLOUDS: usize = 4;

/// Draws walls, regions, the true trajectory (one `traj` segment per step),
/// the belief-mean path and a few particle clouds.
pub fn render_trajectory(record: &EpisodeRecord, map: &EnvMap) -> String {
    let b = map.bounds;
    let (w, h) = (b.width() * SCALE, b.height() * SCALE);
    let px = |x: f64| (x - b.min.x) * SCALE;
    let py = |y: f64| (b.max.y - y) * SCALE;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{w:.1}" height="{h:.1}" fill="#fafafa" stroke="#000"/>"##
    );

    for r in &map.regions {
        let fill = match r.kind {
            RegionKind::Goal => "#4caf50",
            RegionKind::Trap => "#e53935",
            RegionKind::Light => "#fff59d",
            RegionKind::Start => "#90caf9",
        };
        let _ = writeln!(
            svg,
            r#"<rect class="region {}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" fill-opacity="0.5"/>"#,
            r.kind.as_str(),
            px(r.rect.min.x),
            py(r.rect.max.y),
            r.rect.width() * SCALE,
            r.rect.height() * SCALE,
        );
    }
    for s in &map.walls {
        let _ = writeln!(
            svg,
            r##"<line class="wall" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#212121" stroke-width="3"/>"##,
            px(s.a.x),
            py(s.a.y),
            px(s.b.x),
            py(s.b.y)
        );
    }

    if !record.snapshots.is_empty() {
        let n = record.snapshots.len();
        let stride = n.div_ceil(CLOUDS).max(1);
        for snap in record.snapshots.iter().step_by(stride) {
            let _ = writeln!(svg, r#"<g class="cloud" data-step="{}">"#, snap.step_index);
            for p in snap.particles.iter().filter(|p| p.len() >= 2) {
                let _ = writeln!(
                    svg,
                    r##"<circle class="particle" cx="{:.2}" cy="{:.2}" r="1.5" fill="#7e57c2" fill-opacity="0.5"/>"##,
                    px(p[0]),
                    py(p[1])
                );
            }
            svg.push_str("</g>\n");
        }
    }

    let points: Vec<String> = record
        .belief_means
        .iter()
        .filter(|m| m.len() >= 2)
        .map(|m| format!("{:.2},{:.2}", px(m[0]), py(m[1])))
        .collect();
    if points.len() > 1 {
        let _ = writeln!(
            svg,
            r##"<polyline class="belief-mean" points="{}" fill="none" stroke="#fb8c00" stroke-dasharray="4 3"/>"##,
            points.join(" ")
        );
    }
    for pair in record.trajectory.windows(2) {
        let (a, c) = (&pair[0], &pair[1]);
        if a.len() < 2 || c.len() < 2 {
            continue;
        }
        let _ = writeln!(
            svg,
            r##"<line class="traj" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#1e88e5" stroke-width="2"/>"##,
            px(a[0]),
            py(a[1]),
            px(c[0]),
            py(c[1])
        );
    }
    svg.push_str("</svg>\n");
    svg
}
