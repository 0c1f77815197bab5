//! Closed-form cosine coefficients of piecewise-constant occupancy.
//!
//! For inside intervals `(z_i, z_i')` the coefficients are
//! `a_0 = sum (z_i' - z_i)` and, for `n >= 1`,
//! `a_n = (1 / t_n) sum [sin(t_n (z_i' + 1)) - sin(t_n (z_i + 1))]` with
//! `t_n = n pi / 2`. The `n = 0` case is the limit of the general formula and
//! is handled separately.

use core::f64::consts::FRAC_PI_2;

use super::automaton::MatchedBuffer;
use super::events::{IntervalBuffer, Orientation};
use crate::basis::frequency;
use crate::error::Result;
use crate::field::FofGrid;

/// Adds `sign * sin(n theta)` to `acc[n]` for `n = 1..acc.len()`, where
/// `theta = pi (z + 1) / 2`. Uses the angle-addition recurrence.
#[inline]
fn accumulate_sines(z: f64, sign: f64, acc: &mut [f64]) {
    let theta = FRAC_PI_2 * (z + 1.0);
    let (s1, c1) = (libm::sin(theta), libm::cos(theta));
    let (mut s, mut c) = (s1, c1);
    for a in acc.iter_mut().skip(1) {
        *a += sign * s;
        let next_s = s * c1 + c * s1;
        c = c * c1 - s * s1;
        s = next_s;
    }
}

#[inline]
fn finish(coeffs: &mut [f64]) {
    for (n, a) in coeffs.iter_mut().enumerate().skip(1) {
        *a /= frequency(n);
    }
}

/// Coefficients of a single pixel with the given inside intervals.
pub fn interval_coefficients(intervals: impl IntoIterator<Item = (f64, f64)>, coeffs: &mut [f64]) {
    coeffs.fill(0.0);
    if coeffs.is_empty() {
        return;
    }
    for (z_in, z_out) in intervals {
        coeffs[0] += z_out - z_in;
        accumulate_sines(z_out, 1.0, coeffs);
        accumulate_sines(z_in, -1.0, coeffs);
    }
    finish(coeffs);
}

/// Closed-form coefficients for every pixel of a matched buffer.
pub fn integrate_intervals(buffer: &MatchedBuffer, terms: usize) -> Result<FofGrid> {
    let b = buffer.buffer();
    let mut fof = FofGrid::zeros(b.height(), b.width(), terms)?;
    for y in 0..b.height() {
        for x in 0..b.width() {
            let p = y * b.width() + x;
            if b.pixel(p).is_empty() {
                continue;
            }
            interval_coefficients(buffer.intervals(p), fof.coeffs_mut(x, y));
        }
    }
    Ok(fof)
}

/// Integrates raw, possibly unpaired events without matching: every enter
/// contributes occupancy `-1` and every exit `+1` from `z = -1` up to the
/// event. Identical to [`integrate_intervals`] on well-formed pixels; on
/// broken ones it produces the floating mass the matcher exists to remove.
pub fn integrate_unmatched(buffer: &IntervalBuffer, terms: usize) -> Result<FofGrid> {
    let mut fof = FofGrid::zeros(buffer.height(), buffer.width(), terms)?;
    for y in 0..buffer.height() {
        for x in 0..buffer.width() {
            let events = buffer.at(x, y);
            if events.is_empty() {
                continue;
            }
            let coeffs = fof.coeffs_mut(x, y);
            for e in events {
                let sign = match e.orientation {
                    Orientation::Enter => -1.0,
                    Orientation::Exit => 1.0,
                };
                coeffs[0] += sign * (e.depth + 1.0);
                accumulate_sines(e.depth, sign, coeffs);
            }
            finish(coeffs);
        }
    }
    Ok(fof)
}
