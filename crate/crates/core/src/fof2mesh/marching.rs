//! Marching Cubes over the reconstructed occupancy with per-vertex
//! reliability flags.
//!
//! The sampled volume has one padding layer of zeros on every side, so any
//! surface inside the grid comes out closed. Samples sit at pixel centers in
//! x and y and at cell-centered z locations. The volume is produced one image
//! row at a time, only two rows are alive at once.

use alloc::vec;
use alloc::vec::Vec;

use super::tables::{EDGE_TABLE, TRI_TABLE};
use crate::basis::{make_basis, uniform_z_grid, CosineBasis};
use crate::error::{Error, Result};
use crate::field::{evaluate_column, FofGrid, OccupancyVolume};
use crate::geometry::{pixel_center, TriangleMesh};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Grid edge a vertex was generated on, by its lower endpoint in padded
/// sample indices (`-1` and `W`, `H`, `D` are padding).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeOrigin {
    pub axis: Axis,
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

/// Extracted surface whose vertices know whether their position is exact.
///
/// Vertices on z-parallel edges are reliable: the occupancy along z is a known
/// continuous function of the coefficients. Vertices on x- or y-parallel edges
/// interpolate between independent pixels and are not.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub reliable: Vec<bool>,
    pub origins: Vec<EdgeOrigin>,
    pub height: usize,
    pub width: usize,
    pub depth: usize,
    pub iso: f64,
}

impl ReliabilityMesh {
    pub fn to_mesh(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn reliable_count(&self) -> usize {
        self.reliable.iter().filter(|&&r| r).count()
    }

    /// Position of the padded sample `(i, j, k)`.
    pub fn sample_position(&self, i: i32, j: i32, k: i32) -> Vec3 {
        Vec3::new(
            pixel_center(i as i64, self.width),
            pixel_center(j as i64, self.height),
            pixel_center(k as i64, self.depth),
        )
    }
}

const NONE: u32 = u32::MAX;

/// Bourke edge -> (axis, corner offset of its lower endpoint).
const EDGES: [(Axis, [i32; 3]); 12] = [
    (Axis::X, [0, 0, 0]),
    (Axis::Y, [1, 0, 0]),
    (Axis::X, [0, 1, 0]),
    (Axis::Y, [0, 0, 0]),
    (Axis::X, [0, 0, 1]),
    (Axis::Y, [1, 0, 1]),
    (Axis::X, [0, 1, 1]),
    (Axis::Y, [0, 0, 1]),
    (Axis::Z, [0, 0, 0]),
    (Axis::Z, [1, 0, 0]),
    (Axis::Z, [1, 1, 0]),
    (Axis::Z, [0, 1, 0]),
];

const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// One padded image row of samples plus the vertex ids of its in-row edges.
struct Layer {
    values: Vec<f64>,
    /// Whether any sample in the padded column is non-zero.
    active: Vec<bool>,
    x_ids: Vec<u32>,
    z_ids: Vec<u32>,
}

impl Layer {
    fn new(len: usize, columns: usize) -> Self {
        Self {
            values: vec![0.0; len],
            active: vec![false; columns],
            x_ids: vec![NONE; len],
            z_ids: vec![NONE; len],
        }
    }
}

/// Where the samples of a pixel column come from.
enum Source<'a> {
    Series { fof: &'a FofGrid, basis: CosineBasis },
    Samples(&'a OccupancyVolume),
}

struct Extractor<'a> {
    source: Source<'a>,
    iso: f64,
    width: usize,
    height: usize,
    depth: usize,
    /// Padded stride along z.
    stride: usize,
    mesh: ReliabilityMesh,
}

impl Extractor<'_> {
    #[inline]
    fn at(&self, i: i32, k: i32) -> usize {
        (i + 1) as usize * self.stride + (k + 1) as usize
    }

    fn fill_row(&self, j: i32, layer: &mut Layer) {
        layer.values.fill(0.0);
        layer.active.fill(false);
        layer.x_ids.fill(NONE);
        layer.z_ids.fill(NONE);
        if j < 0 || j as usize >= self.height {
            return;
        }
        let (d, stride) = (self.depth, self.stride);
        for i in 0..self.width {
            let start = (i + 1) * stride + 1;
            let column = &mut layer.values[start..start + d];
            match &self.source {
                Source::Series { fof, basis } => {
                    let coeffs = fof.coeffs(i, j as usize);
                    if coeffs.iter().all(|&c| c == 0.0) {
                        continue;
                    }
                    evaluate_column(coeffs, basis, column);
                }
                Source::Samples(volume) => column.copy_from_slice(volume.column(i, j as usize)),
            }
            layer.active[i + 1] = column.iter().any(|&v| v != 0.0);
        }
    }

    fn push_vertex(&mut self, origin: EdgeOrigin, v0: f64, v1: f64) -> u32 {
        let p0 = self.mesh.sample_position(origin.x, origin.y, origin.z);
        let step = match origin.axis {
            Axis::X => [1, 0, 0],
            Axis::Y => [0, 1, 0],
            Axis::Z => [0, 0, 1],
        };
        let p1 = self
            .mesh
            .sample_position(origin.x + step[0], origin.y + step[1], origin.z + step[2]);
        let t = (self.iso - v0) / (v1 - v0);
        self.mesh.vertices.push(p0 + (p1 - p0) * t);
        self.mesh.reliable.push(origin.axis == Axis::Z);
        self.mesh.origins.push(origin);
        (self.mesh.vertices.len() - 1) as u32
    }

    /// Creates vertices on the x- and z-parallel edges of row `j`.
    fn row_edges(&mut self, j: i32, layer: &mut Layer) {
        let (w, d) = (self.width as i32, self.depth as i32);
        for i in -1..=w {
            let col_active = layer.active[(i + 1) as usize];
            let next_active = i < w && layer.active[(i + 2) as usize];
            if !col_active && !next_active {
                continue;
            }
            for k in -1..=d {
                let here = self.at(i, k);
                let v0 = layer.values[here];
                let below0 = v0 < self.iso;
                if i < w {
                    let v1 = layer.values[self.at(i + 1, k)];
                    if below0 != (v1 < self.iso) {
                        let o = EdgeOrigin {
                            axis: Axis::X,
                            x: i,
                            y: j,
                            z: k,
                        };
                        layer.x_ids[here] = self.push_vertex(o, v0, v1);
                    }
                }
                if k < d && col_active {
                    let v1 = layer.values[here + 1];
                    if below0 != (v1 < self.iso) {
                        let o = EdgeOrigin {
                            axis: Axis::Z,
                            x: i,
                            y: j,
                            z: k,
                        };
                        layer.z_ids[here] = self.push_vertex(o, v0, v1);
                    }
                }
            }
        }
    }

    fn slab(&mut self, j: i32, lo: &Layer, hi: &Layer, y_ids: &mut [u32]) {
        let (w, d) = (self.width as i32, self.depth as i32);
        y_ids.fill(NONE);
        for i in -1..=w {
            let c = (i + 1) as usize;
            if !lo.active[c] && !hi.active[c] {
                continue;
            }
            for k in -1..=d {
                let idx = self.at(i, k);
                let (v0, v1) = (lo.values[idx], hi.values[idx]);
                if (v0 < self.iso) != (v1 < self.iso) {
                    let o = EdgeOrigin {
                        axis: Axis::Y,
                        x: i,
                        y: j,
                        z: k,
                    };
                    y_ids[idx] = self.push_vertex(o, v0, v1);
                }
            }
        }

        for i in -1..w {
            let c = (i + 1) as usize;
            if !(lo.active[c] || lo.active[c + 1] || hi.active[c] || hi.active[c + 1]) {
                continue;
            }
            for k in -1..d {
                let mut case = 0usize;
                for (bit, corner) in CORNERS.iter().enumerate() {
                    let layer = if corner[1] == 0 { lo } else { hi };
                    let v = layer.values[self.at(i + corner[0] as i32, k + corner[2] as i32)];
                    if v < self.iso {
                        case |= 1 << bit;
                    }
                }
                if EDGE_TABLE[case] == 0 {
                    continue;
                }
                let mut ids = [NONE; 12];
                for (e, &(axis, off)) in EDGES.iter().enumerate() {
                    if EDGE_TABLE[case] & (1 << e) == 0 {
                        continue;
                    }
                    let idx = self.at(i + off[0], k + off[2]);
                    ids[e] = match axis {
                        Axis::X => if off[1] == 0 { lo } else { hi }.x_ids[idx],
                        Axis::Z => if off[1] == 0 { lo } else { hi }.z_ids[idx],
                        Axis::Y => y_ids[idx],
                    };
                    debug_assert_ne!(ids[e], NONE);
                }
                for tri in TRI_TABLE[case].chunks_exact(3) {
                    if tri[0] < 0 {
                        break;
                    }
                    self.mesh.triangles.push([
                        ids[tri[0] as usize],
                        ids[tri[1] as usize],
                        ids[tri[2] as usize],
                    ]);
                }
            }
        }
    }
}

/// Marching Cubes on `F = b(z)^T C` sampled at `depth` cell-centered z
/// locations, with a zero padding layer around the volume.
pub fn marching_cubes_flagged(fof: &FofGrid, depth: usize, iso: f64) -> Result<ReliabilityMesh> {
    check_levels(depth, iso)?;
    let source = Source::Series {
        fof,
        basis: make_basis(fof.terms(), &uniform_z_grid(depth))?,
    };
    Ok(extract(source, fof.height(), fof.width(), depth, iso))
}

/// Marching Cubes on an already sampled volume, with the same padding and
/// flags as [`marching_cubes_flagged`]. The z grid must be the uniform
/// cell-centered one.
pub fn marching_cubes_volume(volume: &OccupancyVolume, iso: f64) -> Result<ReliabilityMesh> {
    let depth = volume.depth();
    check_levels(depth, iso)?;
    if volume.z_grid != uniform_z_grid(depth) {
        return Err(Error::InvalidParameter("volume z grid must be uniform and cell-centered"));
    }
    if volume.data.len() != volume.height * volume.width * depth {
        return Err(Error::Shape {
            what: "volume samples",
            expected: volume.height * volume.width * depth,
            actual: volume.data.len(),
        });
    }
    Ok(extract(Source::Samples(volume), volume.height, volume.width, depth, iso))
}

fn check_levels(depth: usize, iso: f64) -> Result<()> {
    if depth < 2 {
        return Err(Error::InvalidParameter("z resolution must be at least 2"));
    }
    // the zero padding has to lie below the iso level
    if !(iso > 0.0) || !iso.is_finite() {
        return Err(Error::InvalidParameter("iso level must be positive and finite"));
    }
    Ok(())
}

fn extract(source: Source<'_>, height: usize, width: usize, depth: usize, iso: f64) -> ReliabilityMesh {
    let stride = depth + 2;
    let len = (width + 2) * stride;
    let mut ex = Extractor {
        source,
        iso,
        width,
        height,
        depth,
        stride,
        mesh: ReliabilityMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            reliable: Vec::new(),
            origins: Vec::new(),
            height,
            width,
            depth,
            iso,
        },
    };
    let mut lo = Layer::new(len, width + 2);
    let mut hi = Layer::new(len, width + 2);
    let mut y_ids = vec![NONE; len];
    ex.fill_row(-1, &mut lo);
    ex.row_edges(-1, &mut lo);
    for j in -1..height as i32 {
        ex.fill_row(j + 1, &mut hi);
        ex.row_edges(j + 1, &mut hi);
        ex.slab(j, &lo, &hi, &mut y_ids);
        core::mem::swap(&mut lo, &mut hi);
    }
    ex.mesh
}
