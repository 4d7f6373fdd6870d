use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Mesh;
use crate::Vec3;

/// Endpoints closer than this (mm) are welded when chaining segments.
pub const WELD_TOLERANCE: f64 = 1e-9;

/// Meshes thinner than this along the direction produce no isolines.
const FLAT_EXTENT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    /// Index into [`IsolineSet::levels`].
    pub level: usize,
    pub points: Vec<Vec3>,
    /// Closed chains do not repeat their first point.
    pub closed: bool,
}

/// Planar level sets of `s(p) = (p − origin)·direction` on a mesh surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolineSet {
    pub direction: Vec3,
    pub origin: Vec3,
    /// Ascending.
    pub levels: Vec<f64>,
    pub polylines: Vec<Polyline>,
}

impl IsolineSet {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn translated(&self, offset: Vec3) -> IsolineSet {
        IsolineSet {
            direction: self.direction,
            origin: self.origin + offset,
            levels: self.levels.clone(),
            polylines: self
                .polylines
                .iter()
                .map(|p| Polyline {
                    level: p.level,
                    points: p.points.iter().map(|q| q + offset).collect(),
                    closed: p.closed,
                })
                .collect(),
        }
    }
}

/// `n` levels equally spaced strictly inside `(min, max)`.
pub fn isoline_levels(min: f64, max: f64, n: usize) -> Vec<f64> {
    let step = (max - min) / (n + 1) as f64;
    (1..=n).map(|i| min + step * i as f64).collect()
}

/// Extracts the mesh/plane intersection chains for `n_levels` planes
/// orthogonal to the unit vector `direction`.
///
/// A vertex counts as above a level when `s ≥ level`, so a level passing
/// exactly through a vertex yields that vertex as a chain point.
pub fn isolines(mesh: &Mesh, origin: Vec3, direction: Vec3, n_levels: usize) -> IsolineSet {
    let mut set = IsolineSet {
        direction,
        origin,
        levels: Vec::new(),
        polylines: Vec::new(),
    };
    if n_levels == 0 || mesh.vertices.is_empty() {
        return set;
    }
    let s: Vec<f64> = mesh.vertices.iter().map(|v| (v - origin).dot(&direction)).collect();
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max - min >= FLAT_EXTENT) {
        return set;
    }
    set.levels = isoline_levels(min, max, n_levels);
    for (li, &level) in set.levels.iter().enumerate() {
        let segments = level_segments(mesh, &s, level);
        for (points, closed) in chain(&segments) {
            set.polylines.push(Polyline {
                level: li,
                points,
                closed,
            });
        }
    }
    set
}

/// Crossing of the level on edge (a, b), computed from the sorted index pair
/// so both adjacent triangles get bit-identical points.
fn crossing(mesh: &Mesh, s: &[f64], a: usize, b: usize, level: f64) -> Vec3 {
    let (p, q) = (a.min(b), a.max(b));
    let t = (level - s[p]) / (s[q] - s[p]);
    mesh.vertices[p] + (mesh.vertices[q] - mesh.vertices[p]) * t
}

fn level_segments(mesh: &Mesh, s: &[f64], level: f64) -> Vec<[Vec3; 2]> {
    let mut out = Vec::new();
    for tri in &mesh.triangles {
        let above = tri.map(|i| s[i] >= level);
        if above.iter().all(|&a| a) || above.iter().all(|&a| !a) {
            continue;
        }
        let mut pts = Vec::with_capacity(2);
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if above[k] != above[(k + 1) % 3] {
                pts.push(crossing(mesh, s, a, b, level));
            }
        }
        debug_assert_eq!(pts.len(), 2);
        if (pts[0] - pts[1]).norm() > WELD_TOLERANCE {
            out.push([pts[0], pts[1]]);
        }
    }
    out
}

/// Welds nearby endpoints into shared nodes.
struct Welder {
    cells: HashMap<[i64; 3], Vec<usize>>,
    nodes: Vec<Vec3>,
}

impl Welder {
    fn cell(p: &Vec3) -> [i64; 3] {
        let c = |x: f64| (x / (WELD_TOLERANCE * 4.0)).floor() as i64;
        [c(p.x), c(p.y), c(p.z)]
    }

    fn node(&mut self, p: Vec3) -> usize {
        let [cx, cy, cz] = Self::cell(&p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&[cx + dx, cy + dy, cz + dz]) {
                        if let Some(&id) = ids.iter().find(|&&id| (self.nodes[id] - p).norm() <= WELD_TOLERANCE) {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.nodes.len();
        self.nodes.push(p);
        self.cells.entry([cx, cy, cz]).or_default().push(id);
        id
    }
}

fn chain(segments: &[[Vec3; 2]]) -> Vec<(Vec<Vec3>, bool)> {
    let mut welder = Welder {
        cells: HashMap::new(),
        nodes: Vec::new(),
    };
    let ends: Vec<[usize; 2]> = segments
        .iter()
        .map(|[a, b]| [welder.node(*a), welder.node(*b)])
        .filter(|[a, b]| a != b)
        .collect();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); welder.nodes.len()];
    for (i, [a, b]) in ends.iter().enumerate() {
        adjacency[*a].push(i);
        adjacency[*b].push(i);
    }
    let mut used = vec![false; ends.len()];
    let mut out = Vec::new();

    let walk = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut path = vec![start];
        let mut at = start;
        while let Some(&seg) = adjacency[at].iter().find(|&&s| !used[s]) {
            used[seg] = true;
            let [a, b] = ends[seg];
            at = if a == at { b } else { a };
            if at == start {
                return (path, true);
            }
            path.push(at);
        }
        (path, false)
    };

    // open chains first, starting from odd-degree nodes
    for node in 0..adjacency.len() {
        if adjacency[node].len() % 2 == 1 && adjacency[node].iter().any(|&s| !used[s]) {
            let (path, closed) = walk(node, &mut used);
            out.push((path, closed));
        }
    }
    for seg in 0..ends.len() {
        if !used[seg] {
            let (path, closed) = walk(ends[seg][0], &mut used);
            out.push((path, closed));
        }
    }
    out.into_iter()
        .map(|(path, closed)| (path.into_iter().map(|n| welder.nodes[n]).collect(), closed))
        .collect()
}
