//! Exact point-to-mesh distance with a bounding volume hierarchy.

use alloc::vec::Vec;

use super::sampling::canonical_triangles;
use crate::geometry::TriangleMesh;
use crate::vec3::Vec3;

/// Closest point to `p` on the triangle `[a, b, c]` (Voronoi region walk).
/// Degenerate triangles fall back to their edges.
pub fn closest_point_on_triangle(p: Vec3, [a, b, c]: [Vec3; 3]) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    if ab.cross(ac).norm_squared() == 0.0 {
        return [
            closest_point_on_segment(p, a, b),
            closest_point_on_segment(p, b, c),
            closest_point_on_segment(p, c, a),
        ]
        .into_iter()
        .min_by(|x, y| (*x - p).norm_squared().total_cmp(&(*y - p).norm_squared()))
        .expect("three edges");
    }
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

fn closest_point_on_segment(p: Vec3, a: Vec3, b: Vec3) -> Vec3 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return a;
    }
    a + d * ((p - a).dot(d) / len2).clamp(0.0, 1.0)
}

/// Minimum over every triangle, no acceleration.
pub fn brute_force_distance(p: Vec3, mesh: &TriangleMesh) -> f64 {
    libm::sqrt(
        (0..mesh.triangles.len())
            .map(|t| (closest_point_on_triangle(p, mesh.corners(t)) - p).norm_squared())
            .fold(f64::INFINITY, f64::min),
    )
}

/// Distance from `p` to the surface of `mesh` (infinite for an empty mesh).
/// Builds a hierarchy per call; use [`Bvh`] for many queries.
pub fn point_to_surface(p: Vec3, mesh: &TriangleMesh) -> f64 {
    Bvh::new(mesh).distance(p)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    lo: Vec3,
    hi: Vec3,
    /// Leaf: first triangle. Inner: index of the left child (right is `left + 1`).
    start: u32,
    /// Triangle count of a leaf, zero for inner nodes.
    count: u32,
}

const LEAF_SIZE: usize = 4;

/// Median-split hierarchy over triangle bounding boxes.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    tris: Vec<[Vec3; 3]>,
}

fn bounds(tris: &[[Vec3; 3]]) -> (Vec3, Vec3) {
    let mut lo = Vec3::splat(f64::INFINITY);
    let mut hi = Vec3::splat(f64::NEG_INFINITY);
    for t in tris {
        for &p in t {
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    (lo, hi)
}

fn centroid(t: &[Vec3; 3], axis: usize) -> f64 {
    t[0][axis] + t[1][axis] + t[2][axis]
}

#[inline]
fn box_distance2(p: Vec3, lo: Vec3, hi: Vec3) -> f64 {
    let d = |v: f64, l: f64, h: f64| (l - v).max(0.0).max(v - h);
    let (dx, dy, dz) = (d(p.x, lo.x, hi.x), d(p.y, lo.y, hi.y), d(p.z, lo.z, hi.z));
    dx * dx + dy * dy + dz * dz
}

impl Bvh {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let mut bvh = Self {
            nodes: Vec::new(),
            tris: canonical_triangles(mesh),
        };
        if !bvh.tris.is_empty() {
            bvh.nodes.push(Node {
                lo: Vec3::ZERO,
                hi: Vec3::ZERO,
                start: 0,
                count: 0,
            });
            bvh.build(0, 0, bvh.tris.len());
        }
        bvh
    }

    fn build(&mut self, node: usize, start: usize, end: usize) {
        let (lo, hi) = bounds(&self.tris[start..end]);
        self.nodes[node].lo = lo;
        self.nodes[node].hi = hi;
        if end - start <= LEAF_SIZE {
            self.nodes[node].start = start as u32;
            self.nodes[node].count = (end - start) as u32;
            return;
        }
        let extent = hi - lo;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        self.tris[start..end].select_nth_unstable_by(mid - start, |a, b| {
            centroid(a, axis).total_cmp(&centroid(b, axis))
        });
        let left = self.nodes.len();
        let blank = self.nodes[node];
        self.nodes.push(blank);
        self.nodes.push(blank);
        self.nodes[node].start = left as u32;
        self.nodes[node].count = 0;
        self.build(left, start, mid);
        self.build(left + 1, mid, end);
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    /// Exact distance from `p` to the nearest triangle.
    pub fn distance(&self, p: Vec3) -> f64 {
        if self.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        let mut stack: Vec<(u32, f64)> = Vec::with_capacity(64);
        stack.push((0, box_distance2(p, self.nodes[0].lo, self.nodes[0].hi)));
        while let Some((index, d2)) = stack.pop() {
            if d2 >= best {
                continue;
            }
            let node = self.nodes[index as usize];
            if node.count > 0 {
                let first = node.start as usize;
                for t in &self.tris[first..first + node.count as usize] {
                    best = best.min((closest_point_on_triangle(p, *t) - p).norm_squared());
                }
                continue;
            }
            let (l, r) = (node.start, node.start + 1);
            let dl = box_distance2(p, self.nodes[l as usize].lo, self.nodes[l as usize].hi);
            let dr = box_distance2(p, self.nodes[r as usize].lo, self.nodes[r as usize].hi);
            // nearer child on top of the stack
            if dl <= dr {
                stack.push((r, dr));
                stack.push((l, dl));
            } else {
                stack.push((l, dl));
                stack.push((r, dr));
            }
        }
        libm::sqrt(best)
    }

    /// Mean of [`Bvh::distance`] over `points`, summed in order.
    pub fn mean_distance(&self, points: &[Vec3]) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        points.iter().map(|&p| self.distance(p)).sum::<f64>() / points.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::icosphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vertices_are_on_the_surface() {
        let mesh = icosphere(1.0, 2);
        let bvh = Bvh::new(&mesh);
        for &v in mesh.vertices.iter().take(50) {
            assert_eq!(bvh.distance(v), 0.0);
        }
    }

    #[test]
    fn distance_to_sphere_from_outside() {
        let mesh = icosphere(1.0, 4);
        let d = point_to_surface(Vec3::new(0.0, 0.0, 2.0), &mesh);
        // faceting can only bring the surface inward, by less than the sagitta
        assert!((1.0..1.0 + 2e-3).contains(&d), "{d}");
    }

    #[test]
    fn matches_brute_force() {
        let mesh = icosphere(0.7, 2);
        let bvh = Bvh::new(&mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = Vec3::new(
                rng.random_range(-1.5..1.5),
                rng.random_range(-1.5..1.5),
                rng.random_range(-1.5..1.5),
            );
            assert!((bvh.distance(p) - brute_force_distance(p, &mesh)).abs() < 1e-12);
        }
    }

    #[test]
    fn closest_point_regions() {
        let t = [Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let cases = [
            (Vec3::new(0.2, 0.2, 1.0), Vec3::new(0.2, 0.2, 0.0)),
            (Vec3::new(-1.0, -1.0, 0.0), Vec3::ZERO),
            (Vec3::new(2.0, -0.5, 0.0), Vec3::new(1.0, 0.0, 0.0)),
            (Vec3::new(0.5, -2.0, 3.0), Vec3::new(0.5, 0.0, 0.0)),
            (Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.5, 0.5, 0.0)),
            (Vec3::new(-0.5, 0.5, 0.0), Vec3::new(0.0, 0.5, 0.0)),
        ];
        for (p, want) in cases {
            assert!((closest_point_on_triangle(p, t) - want).norm() < 1e-15, "{p:?}");
        }
        let flat = [Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        assert_eq!(closest_point_on_triangle(Vec3::new(1.5, 1.0, 0.0), flat), Vec3::new(1.5, 0.0, 0.0));
    }
}
