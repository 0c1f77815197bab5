//! FOF to mesh: reliability-flagged Marching Cubes, exact z-crossing
//! refinement and repair of the unreliable vertices.

mod laplacian;
mod marching;
mod refine;
mod tables;

pub use laplacian::{solve_constraint, LaplacianReport, LaplacianSystem, RELATIVE_RESIDUAL};
pub use marching::{marching_cubes_flagged, marching_cubes_volume, Axis, EdgeOrigin, ReliabilityMesh};
pub use refine::{refine_z_crossings, RefineReport, BISECTION_STEPS};
pub use tables::{EDGE_TABLE, TRI_TABLE};

use crate::error::Result;
use crate::field::FofGrid;
use crate::geometry::TriangleMesh;

/// What to do with the unreliable vertices after extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Repair {
    /// Least-squares Laplacian constraint.
    #[default]
    Constraint,
    /// `k` rounds of uniform Laplacian smoothing on unreliable vertices.
    Smooth(usize),
    /// Keep the refined Marching Cubes output.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtractReport {
    pub vertices: usize,
    pub triangles: usize,
    pub reliable: usize,
    pub refine: RefineReport,
    pub laplacian: Option<LaplacianReport>,
}

fn system_for(mesh: &ReliabilityMesh) -> LaplacianSystem {
    let movable: alloc::vec::Vec<bool> = mesh.reliable.iter().map(|r| !r).collect();
    LaplacianSystem::new(mesh.vertices.len(), &mesh.triangles, &movable)
}

/// Moves the unreliable vertices of `mesh` to minimize `||(D - A) X||^2`.
/// Reliable vertices and connectivity are left untouched.
pub fn solve_laplacian_constraint(mesh: &ReliabilityMesh) -> (TriangleMesh, LaplacianReport) {
    let system = system_for(mesh);
    let mut vertices = mesh.vertices.clone();
    let report = solve_constraint(&system, &mut vertices);
    (
        TriangleMesh {
            vertices,
            triangles: mesh.triangles.clone(),
        },
        report,
    )
}

/// Uniform Laplacian smoothing of the unreliable vertices only.
pub fn smooth_unreliable(mesh: &ReliabilityMesh, rounds: usize) -> TriangleMesh {
    let system = system_for(mesh);
    let mut vertices = mesh.vertices.clone();
    system.smooth(&mut vertices, rounds);
    TriangleMesh {
        vertices,
        triangles: mesh.triangles.clone(),
    }
}

/// `||(D - A) X||^2` of a mesh's vertex graph.
pub fn laplacian_energy(mesh: &TriangleMesh) -> f64 {
    let fixed = alloc::vec![false; mesh.vertices.len()];
    LaplacianSystem::new(mesh.vertices.len(), &mesh.triangles, &fixed).energy(&mesh.vertices)
}

/// Full extraction: Marching Cubes at `depth` z samples, z refinement and the
/// requested repair.
pub fn fof_to_mesh(fof: &FofGrid, depth: usize, iso: f64, repair: Repair) -> Result<(TriangleMesh, ExtractReport)> {
    let flagged = marching_cubes_flagged(fof, depth, iso)?;
    let (refined, refine) = refine_z_crossings(&flagged, fof)?;
    let mut report = ExtractReport {
        vertices: refined.vertices.len(),
        triangles: refined.triangles.len(),
        reliable: refined.reliable_count(),
        refine,
        laplacian: None,
    };
    let mesh = match repair {
        Repair::None => refined.to_mesh(),
        Repair::Smooth(rounds) => smooth_unreliable(&refined, rounds),
        Repair::Constraint => {
            let (mesh, lap) = solve_laplacian_constraint(&refined);
            report.laplacian = Some(lap);
            mesh
        }
    };
    Ok((mesh, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::series_value;
    use crate::geometry::pixel_center;
    use crate::mesh2fof::{interval_coefficients, mesh_to_fof};
    use crate::shapes::icosphere;
    use crate::vec3::Vec3;
    use alloc::vec;
    use alloc::vec::Vec;

    fn sphere_fof(res: usize, terms: usize) -> FofGrid {
        mesh_to_fof(&icosphere(0.6, 4), res, res, terms).unwrap().0
    }

    fn slab_fof(size: usize, terms: usize, lo: f64, hi: f64) -> FofGrid {
        let mut fof = FofGrid::zeros(size, size, terms).unwrap();
        for y in 1..size - 1 {
            for x in 1..size - 1 {
                interval_coefficients([(lo, hi)], fof.coeffs_mut(x, y));
            }
        }
        fof
    }

    #[test]
    fn sampled_volume_matches_the_series() {
        let fof = sphere_fof(24, 16);
        let volume = crate::field::evaluate_field(&fof, &crate::basis::make_basis(16, &crate::basis::uniform_z_grid(20)).unwrap())
            .unwrap();
        let a = marching_cubes_flagged(&fof, 20, 0.5).unwrap();
        let b = marching_cubes_volume(&volume, 0.5).unwrap();
        assert_eq!(a, b);
        let mut skewed = volume.clone();
        skewed.z_grid[0] -= 0.01;
        assert!(marching_cubes_volume(&skewed, 0.5).is_err());
    }

    #[test]
    fn zero_field_gives_empty_mesh() {
        let fof = FofGrid::zeros(8, 8, 16).unwrap();
        let (mesh, report) = fof_to_mesh(&fof, 16, 0.5, Repair::Constraint).unwrap();
        assert!(mesh.vertices.is_empty() && mesh.triangles.is_empty());
        assert_eq!(report.reliable, 0);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let fof = FofGrid::zeros(4, 4, 8).unwrap();
        assert!(marching_cubes_flagged(&fof, 1, 0.5).is_err());
        assert!(marching_cubes_flagged(&fof, 8, 0.0).is_err());
        assert!(marching_cubes_flagged(&fof, 8, f64::NAN).is_err());
    }

    #[test]
    fn sphere_extracts_closed_genus_zero_surface() {
        let fof = sphere_fof(64, 64);
        let flagged = marching_cubes_flagged(&fof, 64, 0.5).unwrap();
        let mesh = flagged.to_mesh();
        assert!(mesh.is_closed_manifold());
        assert_eq!(mesh.euler_characteristic(), 2);
        let volume = 4.0 / 3.0 * core::f64::consts::PI * 0.216;
        assert!((mesh.signed_volume() - volume).abs() < 0.02 * volume);
        let reliable = flagged.reliable_count();
        assert!(reliable > 0 && reliable < flagged.vertices.len());
        // no two vertices on the same edge
        let mut origins: Vec<_> = flagged
            .origins
            .iter()
            .map(|o| (o.axis as u8, o.x, o.y, o.z))
            .collect();
        origins.sort_unstable();
        origins.dedup();
        assert_eq!(origins.len(), flagged.vertices.len());
    }

    #[test]
    fn full_pixels_have_nothing_to_refine() {
        let fof = slab_fof(5, 16, -1.0, 1.0);
        let flagged = marching_cubes_flagged(&fof, 16, 0.5).unwrap();
        let (refined, report) = refine_z_crossings(&flagged, &fof).unwrap();
        assert_eq!(refined, flagged);
        assert_eq!(report.refined, 0);
        assert_eq!(report.kept, 0);
        assert!(report.boundary > 0);
    }

    #[test]
    fn refined_crossings_match_interval_ends() {
        let fof = slab_fof(5, 128, -0.25, 0.6);
        let flagged = marching_cubes_flagged(&fof, 64, 0.5).unwrap();
        let (refined, report) = refine_z_crossings(&flagged, &fof).unwrap();
        assert!(report.refined > 0);
        assert_eq!(report.kept, 0);
        for (v, o) in refined.vertices.iter().zip(&refined.origins) {
            if o.axis == Axis::Z {
                let err = (v.z + 0.25).abs().min((v.z - 0.6).abs());
                assert!(err < 2e-3, "crossing at {} off by {err}", v.z);
            }
        }
    }

    #[test]
    fn refined_z_is_insensitive_to_sampling() {
        let fof = sphere_fof(64, 128);
        // crossing per (pixel, surface side): lower and upper surface
        let crossings = |depth: usize| {
            let flagged = marching_cubes_flagged(&fof, depth, 0.5).unwrap();
            let (refined, _) = refine_z_crossings(&flagged, &fof).unwrap();
            let mut out = vec![[f64::NAN; 2]; 64 * 64];
            for (v, o) in refined.vertices.iter().zip(&refined.origins) {
                if o.axis == Axis::Z && o.z >= 0 && (o.z as usize) + 1 < depth {
                    let slot = &mut out[o.y as usize * 64 + o.x as usize];
                    let side = usize::from(v.z > 0.0);
                    assert!(slot[side].is_nan(), "one crossing per side");
                    slot[side] = v.z;
                }
            }
            out
        };
        let (coarse, fine) = (crossings(128), crossings(256));
        let mut compared = 0;
        for (a, b) in coarse.iter().zip(&fine) {
            for side in 0..2 {
                if a[side].is_finite() && b[side].is_finite() {
                    assert!((a[side] - b[side]).abs() < 1e-3);
                    compared += 1;
                }
            }
        }
        assert!(compared > 1000);
    }

    #[test]
    fn nothing_unreliable_means_nothing_moves() {
        let fof = sphere_fof(32, 32);
        let mut flagged = marching_cubes_flagged(&fof, 32, 0.5).unwrap();
        flagged.reliable.iter_mut().for_each(|r| *r = true);
        let (mesh, report) = solve_laplacian_constraint(&flagged);
        assert_eq!(mesh, flagged.to_mesh());
        assert_eq!(report.free_vertices, 0);
    }

    #[test]
    fn repair_keeps_reliable_vertices_and_connectivity() {
        let fof = sphere_fof(48, 64);
        let flagged = marching_cubes_flagged(&fof, 48, 0.5).unwrap();
        let (refined, _) = refine_z_crossings(&flagged, &fof).unwrap();
        for repair in [Repair::Constraint, Repair::Smooth(3), Repair::None] {
            let (mesh, report) = fof_to_mesh(&fof, 48, 0.5, repair).unwrap();
            assert_eq!(mesh.triangles, refined.triangles);
            for (i, (a, b)) in mesh.vertices.iter().zip(&refined.vertices).enumerate() {
                if refined.reliable[i] {
                    assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
                }
            }
            if repair == Repair::Constraint {
                let lap = report.laplacian.unwrap();
                assert!(lap.energy_after < lap.energy_before);
                assert!(laplacian_energy(&mesh) < laplacian_energy(&refined.to_mesh()));
            }
        }
    }

    /// Mean over thin z slabs of the variance of the normals' z component.
    fn ring_variance(mesh: &TriangleMesh) -> f64 {
        const RINGS: usize = 40;
        let normals = mesh.vertex_normals();
        let mut sums = [[0.0f64; 3]; RINGS];
        for (v, n) in mesh.vertices.iter().zip(&normals) {
            let ring = (((v.z + 0.6) / 1.2 * RINGS as f64) as usize).min(RINGS - 1);
            sums[ring][0] += 1.0;
            sums[ring][1] += n.z;
            sums[ring][2] += n.z * n.z;
        }
        let used: Vec<f64> = sums
            .iter()
            .filter(|s| s[0] > 1.0)
            .map(|s| s[2] / s[0] - (s[1] / s[0]).powi(2))
            .collect();
        used.iter().sum::<f64>() / used.len() as f64
    }

    #[test]
    fn unrepaired_surface_shows_banding() {
        let fof = sphere_fof(96, 128);
        let (raw, _) = fof_to_mesh(&fof, 96, 0.5, Repair::None).unwrap();
        let (fixed, _) = fof_to_mesh(&fof, 96, 0.5, Repair::Constraint).unwrap();
        assert!(ring_variance(&raw) > ring_variance(&fixed));
    }

    #[test]
    fn vertices_sit_near_a_sign_change() {
        let (res, depth) = (40, 40);
        let fof = sphere_fof(res, 64);
        let (mesh, _) = fof_to_mesh(&fof, depth, 0.5, Repair::None).unwrap();
        let cell = 2.0 / res as f64;
        let dz = 2.0 / depth as f64;
        let value = |i: i64, j: i64, z: f64| {
            if i < 0 || j < 0 || i >= res as i64 || j >= res as i64 || !(-1.0..=1.0).contains(&z) {
                0.0
            } else {
                series_value(fof.coeffs(i as usize, j as usize), z)
            }
        };
        for v in &mesh.vertices {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let ci = ((v.x + 1.0) / cell - 0.5).floor() as i64;
            let cj = ((v.y + 1.0) / cell - 0.5).floor() as i64;
            for j in cj..=cj + 1 {
                for i in ci..=ci + 1 {
                    let p = Vec3::new(pixel_center(i, res), pixel_center(j, res), v.z);
                    assert!((p - *v).norm() <= cell * 2f64.sqrt() + 1e-12);
                    for s in 0..=16 {
                        let f = value(i, j, v.z - dz + dz * s as f64 / 8.0);
                        lo = lo.min(f);
                        hi = hi.max(f);
                    }
                }
            }
            assert!(lo <= 0.5 && 0.5 <= hi, "no sign change near {v:?}");
        }
    }
}
