//! Mesh to FOF conversion: rasterize surface crossings, match them into
//! inside intervals and integrate the cosine coefficients in closed form.

mod automaton;
mod events;
mod integrate;

pub use automaton::{
    filter_events, is_alternating, match_discontinuities, step, Action, MatchReport, MatchedBuffer, State,
    Symbol, Transition, TRANSITIONS,
};
pub use events::{rasterize_events, IntervalBuffer, Orientation, RasterEvent};
pub use integrate::{integrate_intervals, integrate_unmatched, interval_coefficients};

use crate::error::Result;
use crate::field::FofGrid;
use crate::geometry::TriangleMesh;

/// How crossing events are turned into intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Filter each pixel with the discontinuity automaton.
    #[default]
    Automaton,
    /// Integrate the raw events as they come. Only meaningful for comparison
    /// on broken meshes.
    Unmatched,
}

/// Converts a normalized mesh to an `height x width x terms` grid.
pub fn mesh_to_fof(mesh: &TriangleMesh, height: usize, width: usize, terms: usize) -> Result<(FofGrid, MatchReport)> {
    mesh_to_fof_with(mesh, height, width, terms, MatchMode::Automaton)
}

pub fn mesh_to_fof_with(
    mesh: &TriangleMesh,
    height: usize,
    width: usize,
    terms: usize,
    mode: MatchMode,
) -> Result<(FofGrid, MatchReport)> {
    // validate sizes before doing any work
    FofGrid::zeros(1, 1, terms)?;
    let (buffer, skipped) = rasterize_events(mesh, height, width)?;
    match mode {
        MatchMode::Automaton => {
            let (matched, mut report) = match_discontinuities(&buffer)?;
            report.triangles_skipped = skipped;
            Ok((integrate_intervals(&matched, terms)?, report))
        }
        MatchMode::Unmatched => {
            let report = MatchReport {
                pixels_total: buffer.pixel_count(),
                events_total: buffer.event_count(),
                triangles_skipped: skipped,
                ..MatchReport::default()
            };
            Ok((integrate_unmatched(&buffer, terms)?, report))
        }
    }
}
