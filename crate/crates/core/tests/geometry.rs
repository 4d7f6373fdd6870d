use std::time::Instant;

use nalgebra::{Matrix3, Rotation3, Unit};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spineviz_core::dataset::Mesh;
use spineviz_core::geometry::{barycenter, isolines, orthonormal_basis, silhouette, to_local_force};
use spineviz_core::sim::meshgen::disc_mesh;
use spineviz_core::{Error, Vec3};

fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let axis = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).into_inner()
}

#[test]
fn frame_correction_preserves_norm_and_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    for _ in 0..1000 {
        let phi = random_rotation(&mut rng);
        let f = Vec3::new(rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
        let local = to_local_force(f, &phi).unwrap();
        let scale = f.norm().max(1e-300);
        assert!((local.norm() - f.norm()).abs() <= 1e-9 * scale);
        assert!((phi * local - f).norm() <= 1e-9 * scale);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn frame_correction_rz90() {
    let phi = Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_2).into_inner();
    let local = to_local_force(Vec3::new(1.0, 0.0, 0.0), &phi).unwrap();
    assert!((local - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn non_orthonormal_frame_is_rejected() {
    let phi = Matrix3::identity() * 1.01;
    assert!(matches!(to_local_force(Vec3::x(), &phi), Err(Error::Frame { .. })));
    let reflection = Matrix3::from_diagonal(&Vec3::new(-1.0, 1.0, 1.0));
    assert!(matches!(to_local_force(Vec3::x(), &reflection), Err(Error::Frame { .. })));
}

fn bundled_disc() -> Mesh {
    disc_mesh("C2C3", Vec3::new(0.0, 136.0, 0.0), Vec3::new(0.0, 119.0, 0.0))
}

/// Plane/triangle intersection segments computed edge by edge.
fn oracle_points(mesh: &Mesh, origin: Vec3, dir: Vec3, level: f64) -> Vec<Vec3> {
    let mut out = Vec::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (mesh.vertices[tri[k]], mesh.vertices[tri[(k + 1) % 3]]);
            let (sa, sb) = ((a - origin).dot(&dir) - level, (b - origin).dot(&dir) - level);
            if (sa < 0.0) != (sb < 0.0) {
                out.push(a + (b - a) * (sa / (sa - sb)));
            }
        }
    }
    out
}

fn check_isolines(dir: Vec3) {
    let mesh = bundled_disc();
    let origin = barycenter(&mesh).unwrap();
    let set = isolines(&mesh, origin, dir, 5);
    assert_eq!(set.levels.len(), 5);
    assert!(!set.polylines.is_empty());
    for (li, &level) in set.levels.iter().enumerate() {
        let oracle = oracle_points(&mesh, origin, dir, level);
        let ours: Vec<Vec3> = set.polylines.iter().filter(|p| p.level == li).flat_map(|p| p.points.clone()).collect();
        for v in &ours {
            assert!(((v - origin).dot(&dir) - level).abs() < 1e-6);
            assert!(oracle.iter().any(|o| (o - v).norm() < 1e-9), "vertex {v:?} not on any triangle cut");
        }
        for o in &oracle {
            assert!(ours.iter().any(|v| (o - v).norm() < 1e-9), "cut point {o:?} missing");
        }
    }
}

#[test]
fn isolines_match_brute_force_oracle() {
    check_isolines(Vec3::new(0.0, -1.0, 0.0));
    check_isolines(Vec3::new(1.0, -1.0, 0.0).normalize());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let d = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if d.norm() > 0.1 {
            check_isolines(d.normalize());
        }
    }
}

#[test]
fn silhouette_of_disc_from_behind() {
    let mesh = bundled_disc();
    let edges = silhouette(&mesh, &Vec3::z());
    assert!(!edges.is_empty());
    let mut sorted = edges.clone();
    sorted.sort();
    assert_eq!(edges, sorted);
}

proptest! {
    #[test]
    fn basis_is_orthonormal(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let n = Vec3::new(x, y, z);
        prop_assume!(n.norm() > 1e-3);
        let n = n.normalize();
        let (u, v) = orthonormal_basis(&n);
        prop_assert!(u.dot(&n).abs() < 1e-12 && v.dot(&n).abs() < 1e-12 && u.dot(&v).abs() < 1e-12);
        prop_assert!((u.norm() - 1.0).abs() < 1e-12 && (v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_round_trip(ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0, angle in -3.1f64..3.1,
                           fx in -1e3f64..1e3, fy in -1e3f64..1e3, fz in -1e3f64..1e3) {
        let phi = Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::new(ax, ay, az)), angle).into_inner();
        let f = Vec3::new(fx, fy, fz);
        let local = to_local_force(f, &phi).unwrap();
        prop_assert!((phi * local - f).norm() <= 1e-9 * f.norm().max(1.0));
    }
}
