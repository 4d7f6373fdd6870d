use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Triangle mesh of one structure, in millimetres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub owner: String,
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Checks index ranges only. Use [`Mesh::validate`] for the full load
    /// invariants.
    pub fn new(owner: impl Into<String>, vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= n)) {
            return Err(Error::Geometry(format!("triangle {t:?} indexes past {n} vertices")));
        }
        Ok(Mesh {
            owner: owner.into(),
            vertices,
            triangles,
        })
    }

    pub fn normal(&self, tri: usize) -> Vec3 {
        let [a, b, c] = self.triangles[tri].map(|i| self.vertices[i]);
        (b - a).cross(&(c - a))
    }

    pub fn area(&self, tri: usize) -> f64 {
        0.5 * self.normal(tri).norm()
    }

    /// Full invariants expected of loaded meshes: at least four vertices,
    /// at least one triangle, no zero-area triangles.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 4 {
            return Err(Error::format(None, format!("mesh `{}` has fewer than 4 vertices", self.owner)));
        }
        if self.triangles.is_empty() {
            return Err(Error::format(None, format!("mesh `{}` has no triangles", self.owner)));
        }
        if let Some(i) = (0..self.triangles.len()).find(|&i| self.area(i) <= 0.0) {
            return Err(Error::format(None, format!("mesh `{}` triangle {i} is degenerate", self.owner)));
        }
        Ok(())
    }

    pub fn translated(&self, offset: Vec3) -> Mesh {
        Mesh {
            owner: self.owner.clone(),
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn to_obj(&self) -> String {
        let mut out = format!("# {}\n", self.owner);
        for v in &self.vertices {
            writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
        }
        out
    }
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<usize> {
    // `f 1/2/3` style references keep only the position index
    let head = tok.split('/').next().unwrap_or("");
    let i: usize = head
        .parse()
        .map_err(|_| Error::format(line, format!("invalid face index `{tok}`")))?;
    if i == 0 || i > n {
        return Err(Error::format(line, format!("face index {i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

/// Reads the `v`/`f` subset of Wavefront OBJ. Other records are skipped,
/// faces that are not triangles are skipped, and zero-area triangles are
/// dropped.
pub fn parse_obj_subset(text: &str, owner: impl Into<String>) -> Result<Mesh> {
    let owner = owner.into();
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, Vec<&str>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            Some("v") => {
                let xyz: Vec<f64> = toks
                    .take(3)
                    .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::format(line, "invalid vertex"))?;
                if xyz.len() != 3 {
                    return Err(Error::format(line, "vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => faces.push((line, toks.collect())),
            _ => {}
        }
    }
    let mut triangles = Vec::with_capacity(faces.len());
    for (line, toks) in faces {
        if toks.len() != 3 {
            log::warn!("{owner}: skipping non-triangular face at line {line}");
            continue;
        }
        let t = [
            parse_index(toks[0], vertices.len(), line)?,
            parse_index(toks[1], vertices.len(), line)?,
            parse_index(toks[2], vertices.len(), line)?,
        ];
        triangles.push(t);
    }
    let mut mesh = Mesh {
        owner,
        vertices,
        triangles,
    };
    let before = mesh.triangles.len();
    let keep: Vec<bool> = (0..before).map(|i| mesh.area(i) > 0.0).collect();
    let mut it = keep.iter();
    mesh.triangles.retain(|_| *it.next().unwrap());
    if mesh.triangles.len() < before {
        log::warn!("{}: dropped {} degenerate triangles", mesh.owner, before - mesh.triangles.len());
    }
    if mesh.triangles.is_empty() {
        return Err(Error::format(None, format!("mesh `{}` has no triangles", mesh.owner)));
    }
    mesh.validate()?;
    Ok(mesh)
}
