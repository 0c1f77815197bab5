// Straightforward matcher to compare the automaton against.

use fof_core::mesh2fof::{Orientation, RasterEvent};

/// Collapse every run of equal letters to its first event, drop a leading
/// exit and a trailing enter.
pub fn reference(events: &[RasterEvent]) -> Vec<RasterEvent> {
    let mut out: Vec<RasterEvent> = Vec::new();
    for e in events {
        if out.last().map(|l| l.orientation) != Some(e.orientation) {
            out.push(*e);
        }
    }
    if out.first().map(|e| e.orientation) == Some(Orientation::Exit) {
        out.remove(0);
    }
    if out.last().map(|e| e.orientation) == Some(Orientation::Enter) {
        out.pop();
    }
    out
}

/// Word number `bits` of length `len`: bit `i` set means event `i` exits.
pub fn word(bits: u32, len: u32) -> Vec<RasterEvent> {
    (0..len)
        .map(|i| {
            let depth = -1.0 + 0.2 * i as f64;
            if bits >> i & 1 == 0 {
                RasterEvent::enter(depth)
            } else {
                RasterEvent::exit(depth)
            }
        })
        .collect()
}
