use std::collections::{BTreeMap, HashSet};

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Bundled ten-body C1..Th3 model. All parameter values are synthetic.
pub const BUNDLED_MODEL: &str = include_str!("../../data/cervical_model.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Body {
    pub id: String,
    /// kg
    pub mass: f64,
    /// Scalar rotational inertia, kg·mm².
    pub inertia: f64,
    /// Rest position of the centre of mass, mm.
    pub position: [f64; 3],
    /// Rest orientation as `[w, x, y, z]`.
    #[serde(default = "identity_wxyz")]
    pub orientation: [f64; 4],
    /// Fixed bodies are not integrated (the caudal end of the chain).
    #[serde(default)]
    pub fixed: bool,
}

fn identity_wxyz() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

impl Body {
    pub fn rest_position(&self) -> Vec3 {
        Vec3::from(self.position)
    }

    pub fn rest_orientation(&self) -> UnitQuaternion<f64> {
        let [w, x, y, z] = self.orientation;
        UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z))
    }
}

/// Paired unilateral facet contacts of one joint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetContacts {
    /// Lateral distance of each contact from the joint centre, mm.
    pub offset: f64,
    /// N/mm
    pub stiffness: f64,
    /// Contact gap at rest, mm.
    pub clearance: f64,
}

/// Spring-damper connection between two adjacent bodies. Joints with
/// `disc = true` are reported as intervertebral discs; others (C1–C2) only
/// carry load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Joint {
    pub cranial: String,
    pub caudal: String,
    pub disc: bool,
    /// Per world axis, N/mm.
    pub stiffness: [f64; 3],
    /// N·s/mm per world axis.
    pub damping: [f64; 3],
    /// N·mm/rad
    pub rotational_stiffness: f64,
    /// N·mm·s/rad
    pub rotational_damping: f64,
    pub facets: Option<FacetContacts>,
}

impl Joint {
    pub fn id(&self) -> String {
        format!("{}{}", self.cranial, self.caudal)
    }

    pub fn facet_ids(&self) -> [String; 2] {
        let id = self.id();
        [format!("{id}_facetL"), format!("{id}_facetR")]
    }
}

/// Multibody description of the spine: bodies ordered cranial to caudal,
/// the topmost one carrying the head mass.
///
/// World axes: x toward the patient's right, y cranial, z posterior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpineModel {
    #[serde(default)]
    pub name: String,
    /// Point on the topmost body where the external head force acts,
    /// relative to its centre of mass, mm.
    pub head_offset: [f64; 3],
    pub bodies: Vec<Body>,
    pub joints: Vec<Joint>,
}

impl SpineModel {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_MODEL).expect("bundled model is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: SpineModel = toml::from_str(text).map_err(|e| Error::Parameter(format!("model: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model serialises")
    }

    pub fn body_index(&self, id: &str) -> Option<usize> {
        self.bodies.iter().position(|b| b.id == id)
    }

    pub fn disc_joints(&self) -> impl Iterator<Item = &Joint> {
        self.joints.iter().filter(|j| j.disc)
    }

    /// Joint index pairs `(cranial, caudal)`.
    pub(crate) fn joint_bodies(&self) -> Vec<(usize, usize)> {
        self.joints
            .iter()
            .map(|j| (self.body_index(&j.cranial).unwrap(), self.body_index(&j.caudal).unwrap()))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Parameter(m));
        if self.bodies.is_empty() {
            return err("model has no bodies".into());
        }
        let mut ids = HashSet::new();
        for b in &self.bodies {
            if !ids.insert(&b.id) {
                return err(format!("duplicate body `{}`", b.id));
            }
            if !(b.mass > 0.0 && b.mass.is_finite()) {
                return err(format!("body `{}`: mass must be positive", b.id));
            }
            if !(b.inertia > 0.0 && b.inertia.is_finite()) {
                return err(format!("body `{}`: inertia must be positive", b.id));
            }
            let q = Quaternion::from(nalgebra::Vector4::new(b.orientation[1], b.orientation[2], b.orientation[3], b.orientation[0]));
            if (q.norm() - 1.0).abs() > 1e-6 {
                return err(format!("body `{}`: orientation is not a unit quaternion", b.id));
            }
        }
        for w in self.bodies.windows(2) {
            if w[0].position[1] <= w[1].position[1] {
                return err(format!("bodies must be ordered cranial to caudal (`{}` above `{}`)", w[0].id, w[1].id));
            }
        }
        let mut pairs = BTreeMap::new();
        for j in &self.joints {
            let (Some(a), Some(b)) = (self.body_index(&j.cranial), self.body_index(&j.caudal)) else {
                return err(format!("joint {}: unknown body", j.id()));
            };
            if a + 1 != b {
                return err(format!("joint {}: bodies are not adjacent", j.id()));
            }
            if pairs.insert(a, ()).is_some() {
                return err(format!("joint {}: duplicate", j.id()));
            }
            let non_neg = j.stiffness.iter().chain(&j.damping).chain([&j.rotational_stiffness, &j.rotational_damping]);
            if non_neg.into_iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return err(format!("joint {}: stiffness and damping must be non-negative", j.id()));
            }
            if let Some(f) = &j.facets {
                if !(f.stiffness >= 0.0 && f.offset > 0.0 && f.clearance >= 0.0) {
                    return err(format!("joint {}: invalid facet parameters", j.id()));
                }
            }
        }
        Ok(())
    }
}

/// Disc stiffness factor for a degeneration degree, `1 / (1 + 0.35 (d − 1))`.
/// Synthetic, monotone decreasing, 1 at degree 1.
pub fn degeneration_factor(degree: u8) -> Result<f64> {
    if !(1..=5).contains(&degree) {
        return Err(Error::Parameter(format!("degeneration degree {degree} outside 1..=5")));
    }
    Ok(1.0 / (1.0 + 0.35 * f64::from(degree - 1)))
}

/// Scales translational and rotational stiffness of the listed discs.
/// Discs not in `degrees` keep degree 1.
pub fn apply_degeneration(model: &SpineModel, degrees: &BTreeMap<String, u8>) -> Result<SpineModel> {
    let mut out = model.clone();
    for (disc, &d) in degrees {
        let k = degeneration_factor(d)?;
        let joint = out
            .joints
            .iter_mut()
            .find(|j| j.disc && &j.id() == disc)
            .ok_or_else(|| Error::Parameter(format!("no disc `{disc}` in model")))?;
        for s in &mut joint.stiffness {
            *s *= k;
        }
        joint.rotational_stiffness *= k;
    }
    Ok(out)
}
