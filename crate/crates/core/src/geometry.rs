//! Triangle meshes and the coordinate conventions shared by every module.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Indexed triangle mesh in normalized coordinates.
///
/// Counter-clockwise winding (seen from outside) marks the outward side. The
/// winding is a convention only: open, non-manifold and inconsistently wound
/// meshes are accepted, which is what the discontinuity matcher is for.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    /// Builds a mesh after checking index bounds and coordinate finiteness.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let mesh = Self {
            vertices,
            triangles,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for t in &self.triangles {
            for &i in t {
                if i as usize >= n {
                    return Err(Error::Index {
                        index: i as usize,
                        len: n,
                    });
                }
            }
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("mesh has non-finite coordinates"));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    #[inline]
    pub fn corners(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Axis-aligned bounding box of the vertices, `None` when there are none.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        )
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| triangle_area(self.corners(t)))
            .sum()
    }

    /// Signed enclosed volume; positive for closed outward-wound meshes.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Area-weighted vertex normals (unit length; zero for isolated vertices).
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut normals = alloc::vec![Vec3::ZERO; self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = self.corners(t);
            let n = (b - a).cross(c - a);
            for &i in tri {
                normals[i as usize] += n;
            }
        }
        normals.iter_mut().for_each(|n| *n = n.normalized());
        normals
    }

    /// Sorted list of undirected edges `(lo, hi)`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// `V - E + F` over referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = alloc::vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &i in t {
                used[i as usize] = true;
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        v - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// True when every edge is shared by exactly two triangles in opposite
    /// directions (closed, consistently oriented 2-manifold edges).
    pub fn is_closed_manifold(&self) -> bool {
        let mut directed: Vec<(u32, u32)> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .collect();
        directed.sort_unstable();
        if directed.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        directed
            .iter()
            .all(|&(a, b)| directed.binary_search(&(b, a)).is_ok())
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }
}

#[inline]
pub fn triangle_area([a, b, c]: [Vec3; 3]) -> f64 {
    0.5 * (b - a).cross(c - a).norm()
}

/// Uniform scale followed by a translation: `p' = scale * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub translation: Vec3,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        scale: 1.0,
        translation: Vec3::ZERO,
    };

    #[inline]
    pub fn apply(&self, p: Vec3) -> Vec3 {
        p * self.scale + self.translation
    }

    pub fn inverse(&self) -> Similarity {
        Similarity {
            scale: 1.0 / self.scale,
            translation: -self.translation / self.scale,
        }
    }
}

/// Centers `mesh` and scales it uniformly so its longest bounding-box axis
/// spans `[-(1 - margin), 1 - margin]`.
pub fn normalize_mesh(mesh: &TriangleMesh, margin: f64) -> Result<(TriangleMesh, Similarity)> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::InvalidParameter("margin must lie in [0, 1)"));
    }
    let (lo, hi) = mesh.bounds().ok_or(Error::EmptyInput)?;
    let extent = hi - lo;
    let longest = extent.x.max(extent.y).max(extent.z);
    if !(longest > 0.0) {
        return Err(Error::DegenerateInput("bounding box has zero extent"));
    }
    let center = (lo + hi) * 0.5;
    let scale = 2.0 * (1.0 - margin) / longest;
    let transform = Similarity {
        scale,
        translation: -center * scale,
    };
    Ok((mesh.map_vertices(|p| transform.apply(p)), transform))
}

/// Continuous coordinate of the center of pixel `index` on an axis with
/// `count` pixels spanning `[-1, 1]`.
#[inline]
pub fn pixel_center(index: i64, count: usize) -> f64 {
    -1.0 + (2 * index + 1) as f64 / count as f64
}

/// Inverse of [`pixel_center`]: continuous pixel coordinate of `t`, where
/// pixel centers land on integers.
#[inline]
pub fn to_pixel(t: f64, count: usize) -> f64 {
    (t + 1.0) * count as f64 * 0.5 - 0.5
}
