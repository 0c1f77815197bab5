//! Properties of mesh-to-FOF conversion.

use fof_core::mesh2fof::{mesh_to_fof_with, MatchMode};
use fof_core::shapes::{icosphere, open_sphere, torus};
use fof_core::{evaluate_point, mesh_to_fof, TriangleMesh};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shuffled(mesh: &TriangleMesh, seed: u64) -> TriangleMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = mesh.clone();
    out.triangles.shuffle(&mut rng);
    for t in out.triangles.iter_mut() {
        let k = rng.random_range(0..3);
        t.rotate_left(k);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn triangle_order_is_irrelevant(seed in any::<u64>()) {
        for mesh in [icosphere(0.6, 2), torus(0.5, 0.2, 24, 12), open_sphere(0.6, 2, 0.1, 3)] {
            let a = mesh_to_fof(&mesh, 40, 40, 16).unwrap();
            let b = mesh_to_fof(&shuffled(&mesh, seed), 40, 40, 16).unwrap();
            let worst = a.0.data().iter().zip(b.0.data()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            prop_assert_eq!(worst, 0.0);
            prop_assert_eq!(a.1, b.1);
        }
    }
}

#[test]
fn zeroth_coefficient_is_the_chord() {
    let (fof, report) = mesh_to_fof(&icosphere(0.6, 5), 64, 64, 32).unwrap();
    assert_eq!(report.events_dropped, 0);
    for y in 0..64 {
        for x in 0..64 {
            let (cx, cy) = (-1.0 + (2 * x + 1) as f64 / 64.0, -1.0 + (2 * y + 1) as f64 / 64.0);
            let r2 = 0.36 - cx * cx - cy * cy;
            let chord = 2.0 * r2.max(0.0).sqrt();
            let a0 = fof.coeffs(x, y)[0];
            // inscribed facets shorten chords near the silhouette
            assert!(a0 <= chord + 1e-12 && (a0 >= chord - 0.01 || r2 < 0.02), "{x},{y}: {a0} vs {chord}");
        }
    }
}

#[test]
fn occupancy_inside_and_outside() {
    // ring in the xz plane: the central ray crosses the tube at |z| in [0.3, 0.7]
    let (fof, _) = mesh_to_fof(&torus(0.5, 0.2, 96, 48), 64, 64, 128).unwrap();
    assert!((evaluate_point(&fof, 32, 32, 0.5).unwrap() - 1.0).abs() < 0.05);
    assert!((evaluate_point(&fof, 32, 32, -0.5).unwrap() - 1.0).abs() < 0.05);
    assert!(evaluate_point(&fof, 32, 32, 0.0).unwrap().abs() < 0.05);
    assert!(evaluate_point(&fof, 32, 32, 0.9).unwrap().abs() < 0.05);
}

#[test]
fn unmatched_integration_leaves_mass_behind_holes() {
    let open = open_sphere(0.6, 4, 0.1, 7);
    let (matched, report) = mesh_to_fof_with(&open, 64, 64, 32, MatchMode::Automaton).unwrap();
    let (raw, _) = mesh_to_fof_with(&open, 64, 64, 32, MatchMode::Unmatched).unwrap();
    assert!(report.pixels_modified > 0);
    let negative = |fof: &fof_core::FofGrid| (0..64 * 64).filter(|&i| fof.coeffs(i % 64, i / 64)[0] < -1e-12).count();
    assert_eq!(negative(&matched), 0);
    assert!(matched != raw);
}
