//! Mesh and normal-map comparison metrics.
//!
//! Distances are in the units of the input meshes.

mod bvh;
mod image;
mod normals;
mod sampling;

pub use bvh::{brute_force_distance, closest_point_on_triangle, point_to_surface, Bvh};
pub use image::{psnr, psnr_ssim, ssim, SSIM_RADIUS, SSIM_SIGMA};
pub use normals::{normal_difference, render_normal_map, render_normal_maps, NormalMapImage, DEFAULT_YAWS};
pub use sampling::{canonical_triangles, sample_surface, SampledSurface};

use crate::error::{Error, Result};
use crate::geometry::TriangleMesh;
use crate::shapes::Analytic;

/// Surface samples per mesh side when the caller has no preference.
pub const DEFAULT_SAMPLES: usize = 100_000;

fn non_empty(mesh: &TriangleMesh) -> Result<()> {
    if mesh.triangles.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Mean distance from `count` points sampled on `pred` to the surface of `gt`.
pub fn p2s(pred: &TriangleMesh, gt: &TriangleMesh, count: usize, seed: u64) -> Result<f64> {
    non_empty(gt)?;
    let samples = sample_surface(pred, count, seed)?;
    Ok(Bvh::new(gt).mean_distance(&samples.points))
}

/// Symmetric Chamfer distance: the average of both one-sided mean
/// point-to-surface distances. `a` is sampled with `seed`, `b` with `seed + 1`.
pub fn chamfer(a: &TriangleMesh, b: &TriangleMesh, count: usize, seed: u64) -> Result<f64> {
    chamfer_with_seeds(a, b, count, seed, seed.wrapping_add(1))
}

/// [`chamfer`] with an explicit seed per side. Swapping the meshes together
/// with their seeds gives the identical value.
pub fn chamfer_with_seeds(a: &TriangleMesh, b: &TriangleMesh, count: usize, seed_a: u64, seed_b: u64) -> Result<f64> {
    let ab = p2s(a, b, count, seed_a)?;
    let ba = p2s(b, a, count, seed_b)?;
    Ok(0.5 * ab + 0.5 * ba)
}

/// Chamfer distance between a mesh and an exact surface, with the same
/// weighting as [`chamfer`]: the mesh is sampled with `seed`, the surface
/// with `seed + 1`.
pub fn chamfer_to_analytic(mesh: &TriangleMesh, surface: &Analytic, count: usize, seed: u64) -> Result<f64> {
    non_empty(mesh)?;
    let samples = sample_surface(mesh, count, seed)?;
    let to_surface = samples.points.iter().map(|&p| surface.distance(p)).sum::<f64>() / count as f64;
    let exact = surface.sample(count, seed.wrapping_add(1));
    let to_mesh = Bvh::new(mesh).mean_distance(&exact);
    Ok(0.5 * to_surface + 0.5 * to_mesh)
}
