//! Discontinuity matcher.
//!
//! Each pixel's depth-sorted events are read as a word over `{0, 1}` (0 =
//! enter, 1 = exit) terminated by the stop letter `$`, and filtered by a
//! two-state automaton so that the output strictly alternates
//! enter/exit, starting with an enter and ending with an exit. Within a run of
//! equal symbols the first event is kept.

use alloc::vec::Vec;

use super::events::{IntervalBuffer, Orientation, RasterEvent};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    Outside,
    Inside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Enter,
    Exit,
    Stop,
}

impl Symbol {
    pub fn letter(self) -> char {
        match self {
            Symbol::Enter => '0',
            Symbol::Exit => '1',
            Symbol::Stop => '$',
        }
    }
}

impl From<Orientation> for Symbol {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::Enter => Symbol::Enter,
            Orientation::Exit => Symbol::Exit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// Append the event to the output.
    Emit,
    /// Discard the event.
    Drop,
    /// End of input with nothing pending.
    Accept,
    /// End of input while inside: retract the unmatched enter.
    RetractEnter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub from: State,
    pub symbol: Symbol,
    pub action: Action,
    pub to: State,
}

const fn t(from: State, symbol: Symbol, action: Action, to: State) -> Transition {
    Transition {
        from,
        symbol,
        action,
        to,
    }
}

/// The full transition table, indexed by `state * 3 + symbol`.
pub const TRANSITIONS: [Transition; 6] = [
    t(State::Outside, Symbol::Enter, Action::Emit, State::Inside),
    t(State::Outside, Symbol::Exit, Action::Drop, State::Outside),
    t(State::Outside, Symbol::Stop, Action::Accept, State::Outside),
    t(State::Inside, Symbol::Enter, Action::Drop, State::Inside),
    t(State::Inside, Symbol::Exit, Action::Emit, State::Outside),
    t(State::Inside, Symbol::Stop, Action::RetractEnter, State::Outside),
];

#[inline]
pub fn step(state: State, symbol: Symbol) -> &'static Transition {
    let s = match state {
        State::Outside => 0,
        State::Inside => 1,
    };
    let c = match symbol {
        Symbol::Enter => 0,
        Symbol::Exit => 1,
        Symbol::Stop => 2,
    };
    &TRANSITIONS[s * 3 + c]
}

/// Runs the automaton over one pixel's events, appending the kept ones to
/// `out`. Returns the number of dropped events.
pub fn filter_events(events: &[RasterEvent], out: &mut Vec<RasterEvent>) -> usize {
    let start = out.len();
    let mut state = State::Outside;
    for e in events {
        let tr = step(state, e.orientation.into());
        if tr.action == Action::Emit {
            out.push(*e);
        }
        state = tr.to;
    }
    if step(state, Symbol::Stop).action == Action::RetractEnter {
        out.pop();
    }
    events.len() - (out.len() - start)
}

/// Summary of what conversion had to discard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchReport {
    pub pixels_total: usize,
    /// Pixels where the matcher dropped at least one event.
    pub pixels_modified: usize,
    pub events_total: usize,
    pub events_dropped: usize,
    /// Triangles with zero projected area (degenerate or edge-on).
    pub triangles_skipped: usize,
}

/// An [`IntervalBuffer`] whose pixels all alternate enter/exit.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedBuffer(IntervalBuffer);

impl MatchedBuffer {
    /// Wraps a buffer after checking the alternation invariant.
    pub fn new(buffer: IntervalBuffer) -> Result<Self> {
        for p in 0..buffer.pixel_count() {
            if !is_alternating(buffer.pixel(p)) {
                return Err(Error::Precondition("pixel events do not alternate enter/exit"));
            }
        }
        Ok(Self(buffer))
    }

    pub fn buffer(&self) -> &IntervalBuffer {
        &self.0
    }

    pub fn into_inner(self) -> IntervalBuffer {
        self.0
    }

    /// `(enter, exit)` depth pairs of one pixel.
    pub fn intervals(&self, index: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.0
            .pixel(index)
            .chunks_exact(2)
            .map(|pair| (pair[0].depth, pair[1].depth))
    }
}

/// Enter/exit alternation starting with enter and ending with exit, with
/// non-decreasing depths (coincident enter/exit pairs are zero-length
/// intervals).
pub fn is_alternating(events: &[RasterEvent]) -> bool {
    events.len() % 2 == 0
        && events.iter().enumerate().all(|(i, e)| {
            e.orientation
                == if i % 2 == 0 {
                    Orientation::Enter
                } else {
                    Orientation::Exit
                }
        })
        && events.windows(2).all(|w| w[0].depth <= w[1].depth)
}

/// Applies the automaton to every pixel.
pub fn match_discontinuities(buffer: &IntervalBuffer) -> Result<(MatchedBuffer, MatchReport)> {
    if !buffer.is_sorted() {
        return Err(Error::Precondition("pixel events must be sorted by depth"));
    }
    let pixels = buffer.pixel_count();
    let mut offsets = Vec::with_capacity(pixels + 1);
    let mut events = Vec::with_capacity(buffer.event_count());
    let mut report = MatchReport {
        pixels_total: pixels,
        events_total: buffer.event_count(),
        ..MatchReport::default()
    };
    offsets.push(0);
    for p in 0..pixels {
        let dropped = filter_events(buffer.pixel(p), &mut events);
        if dropped > 0 {
            report.pixels_modified += 1;
            report.events_dropped += dropped;
        }
        offsets.push(events.len());
    }
    let matched = IntervalBuffer::from_parts(buffer.height(), buffer.width(), offsets, events);
    Ok((MatchedBuffer(matched), report))
}
