use std::collections::BTreeMap;

use crate::dataset::Mesh;
use crate::Vec3;

/// Mesh edge as a sorted vertex index pair.
pub type Edge = (usize, usize);

/// A face is front-facing when its normal points toward the viewer, with
/// `view_dir` pointing from the scene to the eye. `n·v = 0` is back-facing.
pub fn is_front_facing(normal: &Vec3, view_dir: &Vec3) -> bool {
    normal.dot(view_dir) > 0.0
}

/// Silhouette edges seen along `view_dir`: interior edges between a front-
/// and a back-facing triangle, plus boundary edges of front-facing
/// triangles. Only the direction of `view_dir` matters. Edges are returned
/// sorted.
pub fn silhouette(mesh: &Mesh, view_dir: &Vec3) -> Vec<Edge> {
    let front: Vec<bool> = (0..mesh.triangles.len())
        .map(|i| is_front_facing(&mesh.normal(i), view_dir))
        .collect();
    let mut faces_of: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (f, t) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            faces_of.entry((a.min(b), a.max(b))).or_default().push(f);
        }
    }
    faces_of
        .into_iter()
        .filter(|(_, faces)| match faces.as_slice() {
            [f] => front[*f],
            fs => fs.iter().any(|&f| front[f]) && fs.iter().any(|&f| !front[f]),
        })
        .map(|(e, _)| e)
        .collect()
}
