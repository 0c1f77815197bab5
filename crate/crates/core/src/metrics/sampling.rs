//! Area-weighted uniform sampling of triangle surfaces.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{triangle_area, TriangleMesh};
use crate::vec3::Vec3;

/// Points drawn uniformly from a mesh surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSurface {
    pub points: Vec<Vec3>,
    /// Corners of the triangle each point was drawn from.
    pub sources: Vec<[Vec3; 3]>,
}

impl SampledSurface {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn cmp_point(a: &Vec3, b: &Vec3) -> Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.z.total_cmp(&b.z))
}

/// Triangle corners in an order that depends only on the geometry: each
/// triangle is rotated (keeping its winding) to start at its smallest corner
/// and the list is sorted. Reordering the triangles or the vertices of a mesh
/// leaves the result unchanged.
pub fn canonical_triangles(mesh: &TriangleMesh) -> Vec<[Vec3; 3]> {
    let mut tris: Vec<[Vec3; 3]> = (0..mesh.triangles.len())
        .map(|t| {
            let c = mesh.corners(t);
            let first = (0..3)
                .min_by(|&i, &j| cmp_point(&c[i], &c[j]))
                .expect("three corners");
            [c[first], c[(first + 1) % 3], c[(first + 2) % 3]]
        })
        .collect();
    tris.sort_by(|a, b| {
        cmp_point(&a[0], &b[0])
            .then_with(|| cmp_point(&a[1], &b[1]))
            .then_with(|| cmp_point(&a[2], &b[2]))
    });
    tris
}

/// Draws `count` points: a triangle with probability proportional to its
/// area, then a uniform point inside it. Deterministic for a given seed.
pub fn sample_surface(mesh: &TriangleMesh, count: usize, seed: u64) -> Result<SampledSurface> {
    if mesh.triangles.is_empty() {
        return Err(Error::EmptyInput);
    }
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1"));
    }
    let tris = canonical_triangles(mesh);
    let mut cdf = Vec::with_capacity(tris.len());
    let mut total = 0.0;
    for &t in &tris {
        total += triangle_area(t);
        cdf.push(total);
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateInput("mesh has zero surface area"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut sources = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.random::<f64>() * total;
        let t = cdf.partition_point(|&c| c <= u).min(tris.len() - 1);
        let [a, b, c] = tris[t];
        let s = libm::sqrt(rng.random::<f64>());
        let r = rng.random::<f64>();
        points.push(a * (1.0 - s) + b * (s * (1.0 - r)) + c * (s * r));
        sources.push(tris[t]);
    }
    Ok(SampledSurface { points, sources })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::cube;
    use alloc::vec;

    fn barycentric_residual(p: Vec3, [a, b, c]: [Vec3; 3]) -> f64 {
        // least-squares barycentric coordinates, then reconstruction error
        let (e0, e1, d) = (b - a, c - a, p - a);
        let (d00, d01, d11) = (e0.dot(e0), e0.dot(e1), e1.dot(e1));
        let (d20, d21) = (d.dot(e0), d.dot(e1));
        let den = d00 * d11 - d01 * d01;
        let v = (d11 * d20 - d01 * d21) / den;
        let w = (d00 * d21 - d01 * d20) / den;
        let u = 1.0 - v - w;
        let off = (a * u + b * v + c * w - p).norm();
        let outside = [u, v, w].iter().map(|&x| (-x).max(0.0)).sum::<f64>();
        off + outside
    }

    #[test]
    fn single_triangle_samples_lie_on_it() {
        let mesh = TriangleMesh::new(
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.2, 0.1), Vec3::new(0.3, 1.0, -0.4)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let s = sample_surface(&mesh, 10, 3).unwrap();
        assert_eq!(s.len(), 10);
        for (&p, &src) in s.points.iter().zip(&s.sources) {
            assert!(barycentric_residual(p, src) < 1e-9);
        }
    }

    #[test]
    fn selection_follows_area() {
        // areas 1 and 3
        let mesh = TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(2.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(10.0, 0.0, 0.0),
                Vec3::new(13.0, 0.0, 0.0),
                Vec3::new(10.0, 2.0, 0.0),
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        )
        .unwrap();
        let s = sample_surface(&mesh, 1_000_000, 11).unwrap();
        let big = s.points.iter().filter(|p| p.x >= 10.0).count() as f64 / 1e6;
        assert!((big - 0.75).abs() < 0.002, "{big}");
    }

    #[test]
    fn cube_samples_center_on_cube() {
        let s = sample_surface(&cube(0.5), 100_000, 5).unwrap();
        let mean = s.points.iter().fold(Vec3::ZERO, |a, &p| a + p) / s.len() as f64;
        assert!(mean.norm() < 0.01);
    }

    #[test]
    fn degenerate_inputs() {
        let flat = TriangleMesh::new(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)], vec![[0, 1, 2]])
            .unwrap();
        assert!(matches!(sample_surface(&flat, 5, 0), Err(Error::DegenerateInput(_))));
        assert!(matches!(sample_surface(&TriangleMesh::default(), 5, 0), Err(Error::EmptyInput)));
        assert!(sample_surface(&cube(1.0), 0, 0).is_err());
    }

    #[test]
    fn order_of_triangles_does_not_matter() {
        let mesh = crate::shapes::icosphere(0.5, 2);
        let mut shuffled = mesh.clone();
        shuffled.triangles.reverse();
        for t in shuffled.triangles.iter_mut() {
            t.rotate_left(1);
        }
        assert_eq!(sample_surface(&mesh, 500, 9).unwrap(), sample_surface(&shuffled, 500, 9).unwrap());
    }
}
