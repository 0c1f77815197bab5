use fof_core::metrics::{
    brute_force_distance, chamfer, chamfer_to_analytic, chamfer_with_seeds, normal_difference, p2s, point_to_surface,
    render_normal_maps, sample_surface, Bvh, DEFAULT_YAWS,
};
use fof_core::shapes::{cube, icosphere, torus, Analytic};
use fof_core::{TriangleMesh, Vec3};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square(z: f64) -> TriangleMesh {
    TriangleMesh::new(
        vec![
            Vec3::new(-0.5, -0.5, z),
            Vec3::new(0.5, -0.5, z),
            Vec3::new(0.5, 0.5, z),
            Vec3::new(-0.5, 0.5, z),
        ],
        vec![[0, 1, 2], [0, 2, 3]],
    )
    .unwrap()
}

#[test]
fn self_distances_vanish() {
    for mesh in [icosphere(0.6, 3), torus(0.5, 0.2, 48, 24), cube(0.4)] {
        assert!(chamfer(&mesh, &mesh, 20_000, 1).unwrap() < 1e-9);
        assert!(p2s(&mesh, &mesh, 20_000, 2).unwrap() < 1e-9);
        let maps = render_normal_maps(&mesh, 64, 64, &DEFAULT_YAWS);
        assert_eq!(normal_difference(&maps, &maps).unwrap(), 0.0);
    }
}

#[test]
fn parallel_squares() {
    let t = 0.125;
    let d = chamfer(&square(0.0), &square(t), 10_000, 4).unwrap();
    assert!((d - t).abs() < 1e-6, "{d}");
}

#[test]
fn seeds_swap_with_meshes() {
    let (a, b) = (icosphere(0.6, 2), icosphere(0.55, 3));
    let ab = chamfer_with_seeds(&a, &b, 5000, 10, 20).unwrap();
    let ba = chamfer_with_seeds(&b, &a, 5000, 20, 10).unwrap();
    assert_eq!(ab, ba);
    let one = p2s(&a, &b, 5000, 10).unwrap().max(p2s(&b, &a, 5000, 20).unwrap());
    assert!(ab >= 0.5 * one);
}

#[test]
fn chamfer_matches_brute_force_reference() {
    let (a, b) = (icosphere(0.6, 4), icosphere(0.6, 5));
    let count = 2000;
    let fast = chamfer_with_seeds(&a, &b, count, 7, 8).unwrap();
    let side = |from: &TriangleMesh, to: &TriangleMesh, seed| {
        let s = sample_surface(from, count, seed).unwrap();
        s.points.iter().map(|&p| brute_force_distance(p, to)).sum::<f64>() / count as f64
    };
    let slow = 0.5 * side(&a, &b, 7) + 0.5 * side(&b, &a, 8);
    assert!((fast - slow).abs() <= 0.01 * slow, "{fast} vs {slow}");
}

#[test]
fn bvh_equals_brute_force_on_random_meshes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        // random triangle soup of 500 faces
        let vertices: Vec<Vec3> = (0..1500)
            .map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let triangles = (0..500u32).map(|t| [3 * t, 3 * t + 1, 3 * t + 2]).collect();
        let mesh = TriangleMesh::new(vertices, triangles).unwrap();
        let p = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        assert!((point_to_surface(p, &mesh) - brute_force_distance(p, &mesh)).abs() < 1e-9);
    }
}

#[test]
fn analytic_surfaces_agree_with_fine_meshes() {
    let cases = [
        (icosphere(0.6, 5), Analytic::Sphere { radius: 0.6 }),
        (torus(0.5, 0.2, 256, 128), Analytic::Torus { major_radius: 0.5, minor_radius: 0.2 }),
    ];
    for (mesh, surface) in cases {
        assert!((mesh.total_area() - surface.area()).abs() < 0.01 * surface.area());
        assert!(chamfer_to_analytic(&mesh, &surface, 20_000, 3).unwrap() < 1e-3);
        for p in surface.sample(200, 5) {
            assert!(surface.distance(p) < 1e-12);
        }
    }
}

#[test]
fn analytic_cylinder_samples_cover_side_and_caps() {
    let c = Analytic::Cylinder { radius: 0.3, half_length: 0.5 };
    let pts = c.sample(20_000, 1);
    let caps = pts.iter().filter(|p| (p.x.abs() - 0.5).abs() < 1e-15).count() as f64 / 20_000.0;
    // caps hold 2 pi r^2 of the area
    let want = 2.0 * std::f64::consts::PI * 0.09 / c.area();
    assert!((caps - want).abs() < 0.01, "{caps} vs {want}");
    assert!(pts.iter().all(|&p| c.distance(p) < 1e-12));
    assert_eq!(c.distance(Vec3::ZERO), 0.3);
    assert!((c.distance(Vec3::new(0.9, 0.0, 0.6)) - 0.5).abs() < 1e-12);
}

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
    fn metrics_ignore_triangle_order(seed in any::<u64>()) {
        let a = icosphere(0.6, 2);
        let b = torus(0.45, 0.15, 24, 12);
        let (sa, sb) = (shuffled(&a, seed), shuffled(&b, seed ^ 1));
        prop_assert_eq!(chamfer(&a, &b, 2000, 3).unwrap(), chamfer(&sa, &sb, 2000, 3).unwrap());
        prop_assert_eq!(p2s(&a, &b, 2000, 3).unwrap(), p2s(&sa, &sb, 2000, 3).unwrap());
        let p = Vec3::new(0.1, -0.7, 0.3);
        prop_assert_eq!(Bvh::new(&a).distance(p), Bvh::new(&sa).distance(p));
        let (ma, msa) = (render_normal_maps(&a, 32, 32, &DEFAULT_YAWS), render_normal_maps(&sa, 32, 32, &DEFAULT_YAWS));
        prop_assert!(normal_difference(&ma, &msa).unwrap() < 1e-12);
    }
}
