//! Mesh and frame mathematics.

mod frame;
mod isolines;
mod silhouette;

use std::collections::HashSet;

pub use frame::{orthonormal_basis, to_local_force, LocalForce, ORTHONORMAL_TOLERANCE};
pub use isolines::{isoline_levels, isolines, IsolineSet, Polyline, WELD_TOLERANCE};
pub use silhouette::{is_front_facing, silhouette, Edge};

use crate::dataset::Mesh;
use crate::{Error, Result, Vec3};

/// Vertices with duplicate positions collapsed, in first-occurrence order.
pub fn unique_vertices(mesh: &Mesh) -> Vec<Vec3> {
    let mut seen = HashSet::with_capacity(mesh.vertices.len());
    mesh.vertices
        .iter()
        .filter(|v| seen.insert([v.x.to_bits(), v.y.to_bits(), v.z.to_bits()]))
        .copied()
        .collect()
}

/// Mean of the unique vertex positions. Not area weighted.
pub fn barycenter(mesh: &Mesh) -> Result<Vec3> {
    let unique = unique_vertices(mesh);
    if unique.is_empty() {
        return Err(Error::Geometry(format!("mesh `{}` is empty", mesh.owner)));
    }
    let sum = unique.iter().fold(Vec3::zeros(), |acc, v| acc + v);
    Ok(sum / unique.len() as f64)
}

/// Mean distance of the unique vertices from the barycenter.
pub fn mean_radius(mesh: &Mesh) -> Result<f64> {
    let c = barycenter(mesh)?;
    let unique = unique_vertices(mesh);
    Ok(unique.iter().map(|v| (v - c).norm()).sum::<f64>() / unique.len() as f64)
}

/// Axis-aligned bounds `(min, max)`.
pub fn bounds(mesh: &Mesh) -> Option<(Vec3, Vec3)> {
    let first = *mesh.vertices.first()?;
    Some(mesh.vertices.iter().fold((first, first), |(lo, hi), v| (lo.inf(v), hi.sup(v))))
}
