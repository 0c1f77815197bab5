use alloc::vec::Vec;

use super::marching::{Axis, ReliabilityMesh};
use crate::error::{Error, Result};
use crate::field::{series_value, series_values, FofGrid};
use crate::geometry::pixel_center;

/// Bisection steps per crossing; shrinks a cell edge below `1e-12`.
pub const BISECTION_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RefineReport {
    pub refined: usize,
    /// Reliable vertices whose edge shows no sign change of the exact field;
    /// they keep the interpolated position.
    pub kept: usize,
    /// Reliable vertices on an edge to the zero padding. The field is not
    /// the cosine series there, so they keep the interpolated position.
    pub boundary: usize,
}

/// Replaces the z of every reliable vertex by the root of `F(z) - iso` on its
/// z edge, found by bisection on the exact cosine series of its pixel.
pub fn refine_z_crossings(mesh: &ReliabilityMesh, fof: &FofGrid) -> Result<(ReliabilityMesh, RefineReport)> {
    if fof.width() != mesh.width {
        return Err(Error::Shape {
            what: "grid width",
            expected: mesh.width,
            actual: fof.width(),
        });
    }
    if fof.height() != mesh.height {
        return Err(Error::Shape {
            what: "grid height",
            expected: mesh.height,
            actual: fof.height(),
        });
    }
    let mut out = mesh.clone();
    let mut report = RefineReport::default();
    let mut jobs: Vec<Bracket<'_>> = Vec::new();
    for (v, origin) in mesh.origins.iter().enumerate() {
        if origin.axis != Axis::Z {
            continue;
        }
        let (x, y) = (origin.x, origin.y);
        let padded = x < 0
            || y < 0
            || x as usize >= mesh.width
            || y as usize >= mesh.height
            || origin.z < 0
            || origin.z as usize + 1 >= mesh.depth;
        if padded {
            report.boundary += 1;
            continue;
        }
        let coeffs = fof.coeffs(x as usize, y as usize);
        let g = |z: f64| series_value(coeffs, z) - mesh.iso;
        let lo = pixel_center(origin.z as i64, mesh.depth);
        let hi = pixel_center(origin.z as i64 + 1, mesh.depth);
        let (g_lo, g_hi) = (g(lo), g(hi));
        if g_lo == 0.0 || g_hi == 0.0 {
            out.vertices[v].z = if g_lo == 0.0 { lo } else { hi };
            report.refined += 1;
            continue;
        }
        if (g_lo < 0.0) == (g_hi < 0.0) {
            report.kept += 1;
            continue;
        }
        jobs.push(Bracket {
            vertex: v,
            coeffs,
            lo,
            hi,
            lo_below: g_lo < 0.0,
        });
    }
    let mut chunks = jobs.chunks_exact_mut(LANES);
    for chunk in &mut chunks {
        bisect::<LANES>(chunk.try_into().expect("chunk of LANES"), mesh.iso);
    }
    for job in chunks.into_remainder() {
        bisect::<1>(core::slice::from_mut(job).try_into().expect("single job"), mesh.iso);
    }
    for job in &jobs {
        out.vertices[job.vertex].z = 0.5 * (job.lo + job.hi);
    }
    report.refined += jobs.len();
    Ok((out, report))
}

/// Independent bisections run in lockstep.
const LANES: usize = 8;

struct Bracket<'a> {
    vertex: usize,
    coeffs: &'a [f64],
    lo: f64,
    hi: f64,
    lo_below: bool,
}

fn bisect<const K: usize>(jobs: &mut [Bracket<'_>; K], iso: f64) {
    let coeffs: [&[f64]; K] = core::array::from_fn(|l| jobs[l].coeffs);
    for _ in 0..BISECTION_STEPS {
        let mid: [f64; K] = core::array::from_fn(|l| 0.5 * (jobs[l].lo + jobs[l].hi));
        let values = series_values(&coeffs, &mid);
        for (l, job) in jobs.iter_mut().enumerate() {
            if (values[l] - iso < 0.0) == job.lo_below {
                job.lo = mid[l];
            } else {
                job.hi = mid[l];
            }
        }
    }
}
