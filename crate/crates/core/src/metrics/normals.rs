//! Orthographic normal-map rendering and normal-map differences.
//!
//! A view at yaw `θ` (degrees) rotates the mesh about the y axis,
//! `p_c = (cos θ x - sin θ z, y, sin θ x + cos θ z)`, and looks along `+z`
//! of that frame: the nearest surface has the smallest `z`. Normals are
//! written in the same rotated frame. One sample per pixel center, no
//! anti-aliasing; background pixels hold the zero vector.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::TriangleMesh;
use crate::raster::cover_triangle;
use crate::vec3::Vec3;

/// The four side views.
pub const DEFAULT_YAWS: [f64; 4] = [0.0, 90.0, 180.0, 270.0];

#[derive(Debug, Clone, PartialEq)]
pub struct NormalMapImage {
    pub height: usize,
    pub width: usize,
    /// View yaw in degrees.
    pub yaw: f64,
    /// Row-major normals.
    pub data: Vec<Vec3>,
}

impl NormalMapImage {
    pub fn blank(height: usize, width: usize, yaw: f64) -> Self {
        Self {
            height,
            width,
            yaw,
            data: vec![Vec3::ZERO; height * width],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Vec3 {
        self.data[y * self.width + x]
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|n| **n != Vec3::ZERO).count()
    }

    /// Channel-interleaved values `(n + 1) / 2` in `[0, 1]`.
    pub fn encoded(&self) -> Vec<f64> {
        self.data
            .iter()
            .flat_map(|n| [n.x, n.y, n.z])
            .map(|c| 0.5 * (c + 1.0))
            .collect()
    }
}

/// `(cos, sin)` of a yaw in degrees, exact at multiples of 90.
fn yaw_cos_sin(yaw: f64) -> (f64, f64) {
    let mut turns = yaw % 360.0;
    if turns < 0.0 {
        turns += 360.0;
    }
    if turns % 90.0 == 0.0 {
        match (turns / 90.0) as u32 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        let r = turns.to_radians();
        (libm::cos(r), libm::sin(r))
    }
}

fn rotate(p: Vec3, (c, s): (f64, f64)) -> Vec3 {
    Vec3::new(c * p.x - s * p.z, p.y, s * p.x + c * p.z)
}

/// Renders one view with a z-buffer and interpolated vertex normals.
pub fn render_normal_map(mesh: &TriangleMesh, height: usize, width: usize, yaw: f64) -> NormalMapImage {
    let rot = yaw_cos_sin(yaw);
    let positions: Vec<Vec3> = mesh.vertices.iter().map(|&p| rotate(p, rot)).collect();
    let normals: Vec<Vec3> = mesh.vertex_normals().into_iter().map(|n| rotate(n, rot)).collect();
    let mut image = NormalMapImage::blank(height, width, yaw);
    let mut depth = vec![f64::INFINITY; height * width];
    for tri in &mesh.triangles {
        let [a, b, c] = tri.map(|i| positions[i as usize]);
        let [na, nb, nc] = tri.map(|i| normals[i as usize]);
        let face = (b - a).cross(c - a).normalized();
        cover_triangle([[a.x, a.y], [b.x, b.y], [c.x, c.y]], width, height, |x, y, w| {
            let i = y * width + x;
            let z = w[0] * a.z + w[1] * b.z + w[2] * c.z;
            if !(z < depth[i]) {
                return;
            }
            let mut n = (na * w[0] + nb * w[1] + nc * w[2]).normalized();
            if n == Vec3::ZERO {
                n = face;
            }
            if n == Vec3::ZERO {
                return;
            }
            depth[i] = z;
            image.data[i] = n;
        });
    }
    image
}

/// One normal map per yaw.
pub fn render_normal_maps(mesh: &TriangleMesh, height: usize, width: usize, yaws: &[f64]) -> Vec<NormalMapImage> {
    yaws.iter().map(|&yaw| render_normal_map(mesh, height, width, yaw)).collect()
}

/// Mean over all pixels of all views of `|n_a - n_b|^2`, background included.
pub fn normal_difference(a: &[NormalMapImage], b: &[NormalMapImage]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            what: "view count",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sum = 0.0;
    let mut pixels = 0usize;
    for (ma, mb) in a.iter().zip(b) {
        check_same_size(ma, mb)?;
        sum += ma
            .data
            .iter()
            .zip(&mb.data)
            .map(|(&p, &q)| (p - q).norm_squared())
            .sum::<f64>();
        pixels += ma.data.len();
    }
    if pixels == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(sum / pixels as f64)
}

pub(crate) fn check_same_size(a: &NormalMapImage, b: &NormalMapImage) -> Result<()> {
    if a.height != b.height {
        return Err(Error::Shape {
            what: "image height",
            expected: a.height,
            actual: b.height,
        });
    }
    if a.width != b.width {
        return Err(Error::Shape {
            what: "image width",
            expected: a.width,
            actual: b.width,
        });
    }
    Ok(())
}
