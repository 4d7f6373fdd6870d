//! Data directory access and the immutable dataset cache.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};
use spineviz_core::dataset::{load_dataset, write_dataset, SimulationDataset, MANIFEST_FILE};
use spineviz_core::sim::{Scenario, SpineModel};
use tokio::sync::OnceCell;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("dataset `{0}` not found")]
    NotFound(String),
    #[error(transparent)]
    Load(#[from] spineviz_core::Error),
}

/// Dataset ids are plain directory names.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Directory of dataset `id` under `dir` if it holds a manifest.
pub fn dataset_dir(dir: &Path, id: &str) -> Option<PathBuf> {
    let path = dir.join(id);
    (valid_id(id) && path.join(MANIFEST_FILE).is_file()).then_some(path)
}

/// Ids of all datasets under `dir`, sorted.
pub fn list_datasets(dir: &Path) -> std::io::Result<Vec<String>> {
    let mut ids = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if dataset_dir(dir, &name).is_some() {
            ids.push(name);
        }
    }
    ids.sort();
    Ok(ids)
}

/// Loads dataset `id` from `dir`.
pub fn open(dir: &Path, id: &str) -> Result<SimulationDataset, StoreError> {
    let path = dataset_dir(dir, id).ok_or_else(|| StoreError::NotFound(id.to_string()))?;
    Ok(load_dataset(path)?)
}

/// Content-derived id of a simulation run.
pub fn simulation_id(model: &SpineModel, scenario: &Scenario) -> String {
    let mut hasher = Sha256::new();
    hasher.update(model.to_toml().as_bytes());
    hasher.update(b"\n--\n");
    hasher.update(scenario.to_toml().as_bytes());
    let mut id = String::from("sim-");
    for b in &hasher.finalize()[..8] {
        let _ = write!(id, "{b:02x}");
    }
    id
}

/// Writes `dataset` to `dir/id`, through a scratch directory so readers never
/// see a partial dataset. An existing dataset of the same id is kept.
pub fn persist(dir: &Path, id: &str, dataset: &SimulationDataset) -> Result<(), spineviz_core::Error> {
    let target = dir.join(id);
    if target.join(MANIFEST_FILE).is_file() {
        return Ok(());
    }
    let scratch = dir.join(format!(".tmp-{id}-{}", std::process::id()));
    let mut ds = dataset.clone();
    ds.manifest.id = id.to_string();
    write_dataset(&scratch, &ds)?;
    if let Err(e) = std::fs::rename(&scratch, &target) {
        let _ = std::fs::remove_dir_all(&scratch);
        if !target.join(MANIFEST_FILE).is_file() {
            return Err(spineviz_core::Error::Io {
                path: target.display().to_string(),
                source: e,
            });
        }
    }
    Ok(())
}

/// Shared dataset cache. Entries are loaded at most once per id, even under
/// concurrent requests, and never change afterwards.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    cache: Mutex<HashMap<String, Arc<OnceCell<Arc<SimulationDataset>>>>>,
}

impl Store {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Store {
            dir: dir.into(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn list(&self) -> std::io::Result<Vec<String>> {
        list_datasets(&self.dir)
    }

    fn cell(&self, id: &str) -> Arc<OnceCell<Arc<SimulationDataset>>> {
        self.cache.lock().unwrap().entry(id.to_string()).or_default().clone()
    }

    pub async fn get(&self, id: &str) -> Result<Arc<SimulationDataset>, StoreError> {
        if dataset_dir(&self.dir, id).is_none() {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let cell = self.cell(id);
        let loaded = cell
            .get_or_try_init(|| {
                let (dir, id) = (self.dir.clone(), id.to_string());
                async move {
                    log::info!("loading dataset {id}");
                    tokio::task::spawn_blocking(move || open(&dir, &id))
                        .await
                        .expect("loader panicked")
                        .map(Arc::new)
                }
            })
            .await?;
        Ok(loaded.clone())
    }

    /// Number of datasets held in memory.
    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().values().filter(|c| c.initialized()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids() {
        assert!(valid_id("sim-0a1b"));
        assert!(valid_id("lateral_bend"));
        assert!(!valid_id("../etc"));
        assert!(!valid_id(".hidden"));
        assert!(!valid_id("a/b"));
        assert!(!valid_id(""));
    }

    #[test]
    fn simulation_ids_are_content_derived() {
        let m = SpineModel::bundled();
        let a = simulation_id(&m, &Scenario::bundled_static());
        assert_eq!(a, simulation_id(&m, &Scenario::bundled_static()));
        assert_ne!(a, simulation_id(&m, &Scenario::bundled_lateral_bend()));
        assert_eq!(a.len(), 4 + 16);
    }
}
