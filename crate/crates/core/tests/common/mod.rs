#![allow(dead_code)]

use std::collections::BTreeMap;

use spineviz_core::sim::meshgen::vertebra_mesh;
use spineviz_core::Vec3;
use spineviz_core::dataset::{assemble, Attribute, DatasetManifest, SimulationDataset, StructureKind, StructureRef, ValueMatrix};

pub const VERTEBRAE: [&str; 4] = ["C2", "C3", "C4", "C5"];

pub fn structures() -> Vec<StructureRef> {
    let mut out = Vec::new();
    for w in VERTEBRAE.windows(2) {
        let id = format!("{}{}", w[0], w[1]);
        out.push(StructureRef::joint(&id, StructureKind::Disc, w[0], w[1]));
        out.push(StructureRef::joint(format!("{id}_facetL"), StructureKind::FacetLeft, w[0], w[1]));
        out.push(StructureRef::joint(format!("{id}_facetR"), StructureKind::FacetRight, w[0], w[1]));
    }
    out
}

/// Mesh-free dataset over C2..C5 with one force-magnitude column per entry.
pub fn synthetic(id: &str, columns: &[(&str, Vec<f64>)]) -> SimulationDataset {
    let n = columns.first().map_or(0, |c| c.1.len());
    let times: Vec<f64> = (0..n).map(|k| k as f64 * 0.01).collect();
    let rows: Vec<Vec<Option<f64>>> = (0..n).map(|k| columns.iter().map(|c| Some(c.1[k])).collect()).collect();
    let matrix = ValueMatrix::from_rows(
        Attribute::ForceMagnitude,
        times,
        columns.iter().map(|c| c.0.to_string()).collect(),
        &rows,
    )
    .unwrap();
    let manifest = DatasetManifest {
        id: id.into(),
        span: "C2..C5".into(),
        dt: 0.01,
        matrices: BTreeMap::from([(Attribute::ForceMagnitude, "force_magnitude.csv".into())]),
        kinematics: None,
        meshes: BTreeMap::new(),
        compare: None,
        structures: structures(),
    };
    assemble(manifest, vec![matrix], None, Vec::new()).unwrap()
}

pub fn bump(n: usize, peak: f64) -> Vec<f64> {
    (0..n)
        .map(|k| peak * (std::f64::consts::PI * k as f64 / (n - 1) as f64).sin().powi(2))
        .collect()
}

/// `(attribute value, element)` pairs of every element whose opening tag
/// contains `needle`.
pub fn elements<'a>(svg: &'a str, needle: &str) -> Vec<&'a str> {
    svg.lines().filter(|l| l.contains(needle)).collect()
}

pub fn attr<'a>(element: &'a str, name: &str) -> Option<&'a str> {
    let key = format!(" {name}=\"");
    let start = element.find(&key)? + key.len();
    let end = element[start..].find('"')? + start;
    Some(&element[start..end])
}

pub fn points(element: &str) -> Vec<(String, String)> {
    attr(element, "points")
        .unwrap_or("")
        .split(' ')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (x, y) = p.split_once(',').unwrap();
            (x.to_string(), y.to_string())
        })
        .collect()
}

/// Uniform scale of the content group.
pub fn content_scale(svg: &str) -> f64 {
    let start = svg.find(") scale(").unwrap() + ") scale(".len();
    let end = svg[start..].find(')').unwrap() + start;
    svg[start..end].parse().unwrap()
}

/// Polygons of one class drawn for one structure.
pub fn polygons_of<'a>(svg: &'a str, class: &str, structure: &str) -> Vec<&'a str> {
    let c = format!("class=\"{class}\"");
    let s = format!("data-structure=\"{structure}\"");
    svg.lines().filter(|l| l.starts_with("<polygon") && l.contains(&c) && l.contains(&s)).collect()
}

/// Adds cylinder meshes for every vertebra, 17 mm apart.
pub fn with_vertebra_meshes(ds: SimulationDataset) -> SimulationDataset {
    let meshes = VERTEBRAE
        .iter()
        .enumerate()
        .map(|(i, v)| vertebra_mesh(v, Vec3::new(0.0, -17.0 * i as f64, 0.0)))
        .collect();
    let mut manifest = ds.manifest.clone();
    manifest.meshes = VERTEBRAE.iter().map(|v| (v.to_string(), format!("meshes/{v}.obj"))).collect();
    assemble(manifest, ds.matrices.into_values().collect(), None, meshes).unwrap()
}
