//! Simulation datasets: value matrices, kinematics, meshes and the manifest
//! that ties them to a structure registry.

mod kinematics;
mod manifest;
mod matrix;
mod mesh;
mod structure;
mod validate;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub use kinematics::{parse_kinematics_csv, KinematicsTrack, Pose};
pub use manifest::DatasetManifest;
pub use matrix::{parse_matrix_csv, Attribute, ValueMatrix};
pub use mesh::{parse_obj_subset, Mesh};
pub use structure::{expand_span, vertebra_sequence, Census, Registry, StructureKind, StructureRef};
pub use validate::{expected_kinds, validate_dataset, Issue, IssueKind, ValidationReport};

use crate::{par, Error, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";

/// A loaded dataset. Immutable once built and safe to share between threads.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationDataset {
    pub manifest: DatasetManifest,
    pub registry: Registry,
    pub matrices: BTreeMap<Attribute, ValueMatrix>,
    pub kinematics: Option<KinematicsTrack>,
    pub meshes: BTreeMap<String, Mesh>,
}

impl SimulationDataset {
    pub fn id(&self) -> &str {
        &self.manifest.id
    }

    pub fn matrix(&self, attribute: Attribute) -> Result<&ValueMatrix> {
        self.matrices
            .get(&attribute)
            .ok_or_else(|| Error::Query(format!("dataset `{}` has no {attribute} matrix", self.id())))
    }

    pub fn attributes(&self) -> Vec<Attribute> {
        self.matrices.keys().copied().collect()
    }

    /// Shared time base: kinematics if present, else the first matrix.
    pub fn times(&self) -> &[f64] {
        self.kinematics
            .as_ref()
            .map(|k| k.times())
            .or_else(|| self.matrices.values().next().map(|m| m.times()))
            .unwrap_or(&[])
    }

    pub fn census(&self) -> Census {
        self.registry.census()
    }
}

/// Structure counts implied by a manifest's registry.
pub fn structure_census(manifest: &DatasetManifest) -> Result<Census> {
    Ok(registry_of(manifest)?.census())
}

fn registry_of(manifest: &DatasetManifest) -> Result<Registry> {
    Registry::new(&expand_span(&manifest.span)?, &manifest.structures)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn context(path: &Path, err: Error) -> Error {
    match err {
        Error::Format { line, message } => Error::Format {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

/// Loads a dataset directory containing `manifest.toml`.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<SimulationDataset> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = DatasetManifest::parse(&read(&manifest_path)?).map_err(|e| context(&manifest_path, e))?;
    let registry = registry_of(&manifest)?;

    let matrix_jobs: Vec<(Attribute, &String)> = manifest.matrices.iter().map(|(a, p)| (*a, p)).collect();
    let matrices = par::map(&matrix_jobs, |(attr, rel)| {
        let path = dir.join(rel);
        let m = parse_matrix_csv(&read(&path)?, *attr).map_err(|e| context(&path, e))?;
        if let Some(c) = m.columns().iter().find(|c| !registry.contains(c)) {
            return Err(Error::format(1, format!("{}: column `{c}` is not a registered structure", path.display())));
        }
        Ok((*attr, m))
    })
    .into_iter()
    .collect::<Result<BTreeMap<_, _>>>()?;

    let kinematics = match &manifest.kinematics {
        Some(rel) => {
            let path = dir.join(rel);
            let k = parse_kinematics_csv(&read(&path)?).map_err(|e| context(&path, e))?;
            if let Some(v) = k.vertebrae().iter().find(|v| registry.vertebra_index(v).is_none()) {
                return Err(Error::format(1, format!("{}: unknown vertebra `{v}`", path.display())));
            }
            Some(k)
        }
        None => None,
    };

    let mesh_jobs: Vec<(&String, &String)> = manifest.meshes.iter().collect();
    let meshes = par::map(&mesh_jobs, |(owner, rel)| {
        if !registry.contains(owner) {
            return Err(Error::format(None, format!("mesh for unknown structure `{owner}`")));
        }
        let path = dir.join(rel);
        let mesh = parse_obj_subset(&read(&path)?, owner.as_str()).map_err(|e| context(&path, e))?;
        Ok(((*owner).clone(), mesh))
    })
    .into_iter()
    .collect::<Result<BTreeMap<_, _>>>()?;

    Ok(SimulationDataset {
        manifest,
        registry,
        matrices,
        kinematics,
        meshes,
    })
}

/// Writes a dataset directory. File names follow the manifest; missing
/// entries get conventional names (`<attribute>.csv`, `kinematics.csv`,
/// `meshes/<id>.obj`).
pub fn write_dataset(dir: impl AsRef<Path>, dataset: &SimulationDataset) -> Result<DatasetManifest> {
    let dir = dir.as_ref();
    let mut manifest = dataset.manifest.clone();
    let write = |rel: &str, text: &str| -> Result<()> {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    manifest.matrices.clear();
    for (attr, m) in &dataset.matrices {
        let rel = dataset
            .manifest
            .matrices
            .get(attr)
            .cloned()
            .unwrap_or_else(|| format!("{attr}.csv"));
        write(&rel, &m.to_csv())?;
        manifest.matrices.insert(*attr, rel);
    }
    manifest.kinematics = match &dataset.kinematics {
        Some(k) => {
            let rel = dataset.manifest.kinematics.clone().unwrap_or_else(|| "kinematics.csv".into());
            write(&rel, &k.to_csv())?;
            Some(rel)
        }
        None => None,
    };
    manifest.meshes.clear();
    for (owner, mesh) in &dataset.meshes {
        let rel = dataset
            .manifest
            .meshes
            .get(owner)
            .cloned()
            .unwrap_or_else(|| format!("meshes/{owner}.obj"));
        write(&rel, &mesh.to_obj())?;
        manifest.meshes.insert(owner.clone(), rel);
    }
    write(MANIFEST_FILE, &manifest.to_toml())?;
    Ok(manifest)
}

/// Assembles an in-memory dataset, checking that every column and mesh
/// names a registered structure.
pub fn assemble(
    manifest: DatasetManifest,
    matrices: Vec<ValueMatrix>,
    kinematics: Option<KinematicsTrack>,
    meshes: Vec<Mesh>,
) -> Result<SimulationDataset> {
    let registry = registry_of(&manifest)?;
    for m in &matrices {
        if let Some(c) = m.columns().iter().find(|c| !registry.contains(c)) {
            return Err(Error::format(None, format!("column `{c}` is not a registered structure")));
        }
    }
    if let Some(mesh) = meshes.iter().find(|m| !registry.contains(&m.owner)) {
        return Err(Error::format(None, format!("mesh for unknown structure `{}`", mesh.owner)));
    }
    Ok(SimulationDataset {
        manifest,
        registry,
        matrices: matrices.into_iter().map(|m| (m.attribute(), m)).collect(),
        kinematics,
        meshes: meshes.into_iter().map(|m| (m.owner.clone(), m)).collect(),
    })
}
