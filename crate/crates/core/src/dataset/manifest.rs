use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Attribute, StructureRef};
use crate::{Error, Result};

/// Dataset manifest (`manifest.toml`). Paths are relative to the dataset
/// directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub id: String,
    /// Vertebra span, e.g. `C1..Th3`.
    pub span: String,
    /// Tick interval in seconds.
    pub dt: f64,
    #[serde(default)]
    pub matrices: BTreeMap<Attribute, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinematics: Option<String>,
    #[serde(default)]
    pub meshes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<String>,
    /// Discs and facet joints of the model. Vertebrae come from `span`.
    #[serde(default)]
    pub structures: Vec<StructureRef>,
}

impl DatasetManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: DatasetManifest =
            toml::from_str(text).map_err(|e| Error::format(None, format!("manifest: {e}")))?;
        if !(m.dt > 0.0 && m.dt.is_finite()) {
            return Err(Error::format(None, format!("manifest: dt must be positive, got {}", m.dt)));
        }
        if m.id.is_empty() || m.id.contains(['/', '\\']) || m.id.starts_with('.') {
            return Err(Error::format(None, format!("manifest: invalid dataset id `{}`", m.id)));
        }
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }
}
