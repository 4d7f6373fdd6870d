//! Procedural stand-in meshes: elliptic cylinders for vertebral bodies and
//! discs.

use std::f64::consts::TAU;

use crate::dataset::Mesh;
use crate::Vec3;

const SEGMENTS: usize = 24;

/// Vertebral body half height, mm.
pub const VERTEBRA_HALF_HEIGHT: f64 = 6.0;
const VERTEBRA_RADII: (f64, f64) = (9.0, 7.0);
const DISC_RADII: (f64, f64) = (8.0, 6.0);

/// Closed elliptic cylinder along y with `rings` vertex rings between the
/// caps. Lateral radius `rx` along x, sagittal radius `rz` along z.
pub fn elliptic_cylinder(owner: &str, centre: Vec3, (rx, rz): (f64, f64), half_height: f64, rings: usize) -> Mesh {
    assert!(rings >= 2);
    let mut vertices = Vec::with_capacity(rings * SEGMENTS + 2);
    for r in 0..rings {
        let y = -half_height + 2.0 * half_height * r as f64 / (rings - 1) as f64;
        for s in 0..SEGMENTS {
            let a = TAU * s as f64 / SEGMENTS as f64;
            vertices.push(centre + Vec3::new(rx * a.cos(), y, rz * a.sin()));
        }
    }
    let bottom = vertices.len();
    vertices.push(centre - Vec3::y() * half_height);
    let top = vertices.len();
    vertices.push(centre + Vec3::y() * half_height);

    let at = |r: usize, s: usize| r * SEGMENTS + s % SEGMENTS;
    let mut triangles = Vec::new();
    for r in 0..rings - 1 {
        for s in 0..SEGMENTS {
            let (a, b, c, d) = (at(r, s), at(r, s + 1), at(r + 1, s + 1), at(r + 1, s));
            // outward winding for angle increasing from +x toward +z
            triangles.push([a, c, b]);
            triangles.push([a, d, c]);
        }
    }
    for s in 0..SEGMENTS {
        triangles.push([bottom, at(0, s), at(0, s + 1)]);
        triangles.push([top, at(rings - 1, s + 1), at(rings - 1, s)]);
    }
    Mesh::new(owner, vertices, triangles).expect("indices in range")
}

pub fn vertebra_mesh(id: &str, centre: Vec3) -> Mesh {
    elliptic_cylinder(id, centre, VERTEBRA_RADII, VERTEBRA_HALF_HEIGHT, 2)
}

/// Disc filling the gap between two vertebral bodies.
pub fn disc_mesh(id: &str, cranial_centre: Vec3, caudal_centre: Vec3) -> Mesh {
    let centre = (cranial_centre + caudal_centre) * 0.5;
    let half = ((cranial_centre.y - caudal_centre.y) * 0.5 - VERTEBRA_HALF_HEIGHT).max(0.5);
    elliptic_cylinder(id, centre, DISC_RADII, half, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{barycenter, silhouette};

    #[test]
    fn cylinder_is_closed_and_outward() {
        let m = vertebra_mesh("C4", Vec3::new(0.0, 102.0, 0.0));
        m.validate().unwrap();
        let c = barycenter(&m).unwrap();
        assert!((c - Vec3::new(0.0, 102.0, 0.0)).norm() < 1e-12);
        for i in 0..m.triangles.len() {
            let p = m.vertices[m.triangles[i][0]] + m.vertices[m.triangles[i][1]] + m.vertices[m.triangles[i][2]];
            assert!(m.normal(i).dot(&(p / 3.0 - c)) > 0.0, "triangle {i} faces inward");
        }
        // every edge shared by exactly two triangles
        let mut count = std::collections::BTreeMap::new();
        for t in &m.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        assert!(count.values().all(|&n| n == 2));
        assert!(!silhouette(&m, &Vec3::new(0.1, 0.2, 1.0)).is_empty());
    }

    #[test]
    fn disc_fits_between_vertebrae() {
        let d = disc_mesh("C2C3", Vec3::new(0.0, 136.0, 0.0), Vec3::new(0.0, 119.0, 0.0));
        d.validate().unwrap();
        let (lo, hi) = crate::geometry::bounds(&d).unwrap();
        assert!((lo.y - (119.0 + VERTEBRA_HALF_HEIGHT)).abs() < 1e-12);
        assert!((hi.y - (136.0 - VERTEBRA_HALF_HEIGHT)).abs() < 1e-12);
    }
}
