//! Synthetic test meshes, all outward-wound.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::TriangleMesh;
use crate::vec3::Vec3;

/// Axis-aligned cube centered at the origin.
pub fn cube(half_extent: f64) -> TriangleMesh {
    let h = half_extent;
    let vertices = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { -h } else { h },
                if i & 2 == 0 { -h } else { h },
                if i & 4 == 0 { -h } else { h },
            )
        })
        .collect();
    let triangles = vec![
        [0, 2, 1],
        [1, 2, 3], // z = -h
        [4, 5, 6],
        [5, 7, 6], // z = +h
        [0, 1, 4],
        [1, 5, 4], // y = -h
        [2, 6, 3],
        [3, 6, 7], // y = +h
        [0, 4, 2],
        [2, 4, 6], // x = -h
        [1, 3, 5],
        [3, 7, 5], // x = +h
    ];
    TriangleMesh {
        vertices,
        triangles,
    }
}

/// Subdivided icosahedron projected onto a sphere; `20 * 4^subdivisions`
/// triangles.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
    let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
    .collect();
    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<Vec3>| {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = ((vertices[a as usize] + vertices[b as usize]) * 0.5).normalized();
                vertices.push(m);
                (vertices.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    for v in &mut vertices {
        *v = *v * radius;
    }
    TriangleMesh {
        vertices,
        triangles,
    }
}

/// Closed quad grid over a parameter domain that wraps in `u` and in `v`.
fn wrapped_grid(nu: usize, nv: usize, point: impl Fn(f64, f64) -> Vec3) -> TriangleMesh {
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            vertices.push(point(i as f64 / nu as f64, j as f64 / nv as f64));
        }
    }
    let idx = |i: usize, j: usize| ((i % nu) * nv + (j % nv)) as u32;
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriangleMesh {
        vertices,
        triangles,
    }
}

/// Torus around the y axis (the ring lies in the xz plane), so view rays
/// along z cross it twice near the center. `2 * major_segments *
/// minor_segments` triangles.
pub fn torus(major_radius: f64, minor_radius: f64, major_segments: usize, minor_segments: usize) -> TriangleMesh {
    wrapped_grid(major_segments, minor_segments, |u, v| {
        let (su, cu) = (libm::sin(TAU * u), libm::cos(TAU * u));
        let (sv, cv) = (libm::sin(TAU * v), libm::cos(TAU * v));
        let r = major_radius + minor_radius * cv;
        Vec3::new(r * cu, -minor_radius * sv, r * su)
    })
}

/// Surface of revolution around the y axis from a profile that starts and
/// ends on the axis (`profile(t)` returns `(radius, y)`), closed by poles.
fn revolve(segments: usize, rings: usize, profile: impl Fn(f64) -> (f64, f64)) -> TriangleMesh {
    let (_, y_bottom) = profile(0.0);
    let (_, y_top) = profile(1.0);
    let mut vertices = vec![Vec3::new(0.0, y_bottom, 0.0)];
    for r in 1..rings {
        let (rad, y) = profile(r as f64 / rings as f64);
        for s in 0..segments {
            let a = TAU * s as f64 / segments as f64;
            vertices.push(Vec3::new(rad * libm::cos(a), y, -rad * libm::sin(a)));
        }
    }
    vertices.push(Vec3::new(0.0, y_top, 0.0));
    let top = (vertices.len() - 1) as u32;
    let ring = |r: usize, s: usize| (1 + (r - 1) * segments + s % segments) as u32;
    let mut triangles = Vec::new();
    for s in 0..segments {
        triangles.push([0, ring(1, s + 1), ring(1, s)]);
        triangles.push([top, ring(rings - 1, s), ring(rings - 1, s + 1)]);
    }
    for r in 1..rings - 1 {
        for s in 0..segments {
            let (a, b, c, d) = (ring(r, s), ring(r, s + 1), ring(r + 1, s + 1), ring(r + 1, s));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriangleMesh {
        vertices,
        triangles,
    }
}

/// Capsule along the y axis: a cylinder of `radius` and half length
/// `half_length` capped by hemispheres.
pub fn capsule(radius: f64, half_length: f64, segments: usize, cap_rings: usize) -> TriangleMesh {
    let cap_rings = cap_rings.max(2);
    let rings = 2 * cap_rings + 1;
    revolve(segments, rings, |t| {
        let k = t * rings as f64;
        if k <= cap_rings as f64 {
            let a = -PI / 2.0 + (k / cap_rings as f64) * PI / 2.0;
            (radius * libm::cos(a), -half_length + radius * libm::sin(a))
        } else if k >= (cap_rings + 1) as f64 {
            let a = ((k - (cap_rings + 1) as f64) / cap_rings as f64) * PI / 2.0;
            (radius * libm::cos(a), half_length + radius * libm::sin(a))
        } else {
            let f = k - cap_rings as f64;
            (radius, -half_length + 2.0 * half_length * f)
        }
    })
}

/// Capped cylinder along the x axis, so its curved side faces the view
/// direction and its silhouette runs along x.
pub fn cylinder(radius: f64, half_length: f64, segments: usize, length_segments: usize) -> TriangleMesh {
    let length_segments = length_segments.max(1);
    let mut vertices = Vec::new();
    for i in 0..=length_segments {
        let x = -half_length + 2.0 * half_length * i as f64 / length_segments as f64;
        for s in 0..segments {
            let a = TAU * s as f64 / segments as f64;
            vertices.push(Vec3::new(x, radius * libm::cos(a), radius * libm::sin(a)));
        }
    }
    let idx = |i: usize, s: usize| (i * segments + s % segments) as u32;
    let mut triangles = Vec::new();
    for i in 0..length_segments {
        for s in 0..segments {
            let (a, b, c, d) = (idx(i, s), idx(i, s + 1), idx(i + 1, s + 1), idx(i + 1, s));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    vertices.push(Vec3::new(-half_length, 0.0, 0.0));
    let left = (vertices.len() - 1) as u32;
    vertices.push(Vec3::new(half_length, 0.0, 0.0));
    let right = (vertices.len() - 1) as u32;
    for s in 0..segments {
        triangles.push([left, idx(0, s + 1), idx(0, s)]);
        triangles.push([right, idx(length_segments, s), idx(length_segments, s + 1)]);
    }
    TriangleMesh {
        vertices,
        triangles,
    }
}

/// Removes exactly `floor(fraction * F)` randomly chosen triangles.
pub fn remove_faces(mesh: &TriangleMesh, fraction: f64, seed: u64) -> TriangleMesh {
    let count = mesh.triangles.len();
    let remove = libm::floor(fraction.clamp(0.0, 1.0) * count as f64) as usize;
    let mut order: Vec<usize> = (0..count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..remove {
        let j = rng.random_range(i..count);
        order.swap(i, j);
    }
    let mut removed = vec![false; count];
    order[..remove].iter().for_each(|&i| removed[i] = true);
    TriangleMesh {
        vertices: mesh.vertices.clone(),
        triangles: mesh
            .triangles
            .iter()
            .zip(&removed)
            .filter(|(_, &r)| !r)
            .map(|(t, _)| *t)
            .collect(),
    }
}

/// Icosphere with a random `fraction` of its faces deleted.
pub fn open_sphere(radius: f64, subdivisions: u32, fraction: f64, seed: u64) -> TriangleMesh {
    remove_faces(&icosphere(radius, subdivisions), fraction, seed)
}


/// Exact surfaces matching the generators above, for ground-truth distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analytic {
    /// Centered at the origin.
    Sphere { radius: f64 },
    /// Axis y, tube centered on the circle of `major_radius` in the xz plane.
    Torus { major_radius: f64, minor_radius: f64 },
    /// Closed cylinder along x, capped at `x = ±half_length`.
    Cylinder { radius: f64, half_length: f64 },
}

impl Analytic {
    /// Unsigned distance from `p` to the surface.
    pub fn distance(&self, p: Vec3) -> f64 {
        match *self {
            Analytic::Sphere { radius } => (p.norm() - radius).abs(),
            Analytic::Torus {
                major_radius,
                minor_radius,
            } => {
                let ring = libm::hypot(p.x, p.z) - major_radius;
                (libm::hypot(ring, p.y) - minor_radius).abs()
            }
            Analytic::Cylinder { radius, half_length } => {
                let radial = libm::hypot(p.y, p.z) - radius;
                let axial = p.x.abs() - half_length;
                if radial <= 0.0 && axial <= 0.0 {
                    -radial.max(axial)
                } else {
                    libm::hypot(radial.max(0.0), axial.max(0.0))
                }
            }
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Analytic::Sphere { radius } => 4.0 * PI * radius * radius,
            Analytic::Torus {
                major_radius,
                minor_radius,
            } => 4.0 * PI * PI * major_radius * minor_radius,
            Analytic::Cylinder { radius, half_length } => TAU * radius * 2.0 * half_length + 2.0 * PI * radius * radius,
        }
    }

    /// `count` area-uniform surface points, deterministic for a given seed.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            match *self {
                Analytic::Sphere { radius } => {
                    // uniform height and azimuth (Archimedes)
                    let z: f64 = rng.random_range(-1.0..=1.0);
                    let phi = rng.random_range(0.0..TAU);
                    let s = libm::sqrt((1.0 - z * z).max(0.0));
                    points.push(Vec3::new(s * libm::cos(phi), s * libm::sin(phi), z) * radius);
                }
                Analytic::Torus {
                    major_radius,
                    minor_radius,
                } => {
                    let u = rng.random_range(0.0..TAU);
                    let v = rng.random_range(0.0..TAU);
                    // area element grows with the distance from the axis
                    let keep = (major_radius + minor_radius * libm::cos(v)) / (major_radius + minor_radius);
                    if rng.random::<f64>() < keep {
                        let ring = major_radius + minor_radius * libm::cos(v);
                        points.push(Vec3::new(ring * libm::cos(u), minor_radius * libm::sin(v), ring * libm::sin(u)));
                    }
                }
                Analytic::Cylinder { radius, half_length } => {
                    let side = TAU * radius * 2.0 * half_length;
                    let phi = rng.random_range(0.0..TAU);
                    if rng.random::<f64>() * self.area() < side {
                        let x = rng.random_range(-half_length..=half_length);
                        points.push(Vec3::new(x, radius * libm::cos(phi), radius * libm::sin(phi)));
                    } else {
                        let r = radius * libm::sqrt(rng.random::<f64>());
                        let x = if rng.random::<bool>() { half_length } else { -half_length };
                        points.push(Vec3::new(x, r * libm::cos(phi), r * libm::sin(phi)));
                    }
                }
            }
        }
        points
    }
}
