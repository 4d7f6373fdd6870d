use serde::{Deserialize, Serialize};

use super::primitives::{layout_primitives, GlyphStill, Primitive};
use crate::dataset::{Attribute, SimulationDataset, StructureKind};
use crate::geometry::silhouette;
use crate::glyphs::{glyphs_at, ForceGlyph, GlyphConfig};
use crate::layout::{layout_charts, snap_tick, ChartLayout, VertebraPlacement, ViewConfig};
use crate::par::Exec;
use crate::{Error, Result, Vec3};

/// Bumped on any incompatible change of [`SceneDescription`].
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanvasSize {
    pub width: u32,
    pub height: u32,
}

impl Default for CanvasSize {
    fn default() -> Self {
        CanvasSize { width: 800, height: 1000 }
    }
}

/// Pose of one vertebra for the animation window: a rest-space mesh vertex
/// `v` is drawn at `rotation * v + translation + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertebraTransform {
    pub id: String,
    /// `[w, x, y, z]`
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
    /// Spine expansion, applied after the pose.
    pub offset: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneDescription {
    pub schema_version: u32,
    pub dataset: String,
    /// Normalised configuration the scene was built from.
    pub config: ViewConfig,
    pub canvas: CanvasSize,
    pub attributes: Vec<Attribute>,
    pub time_range: [f64; 2],
    pub tick: usize,
    pub t: f64,
    /// Structures with a mesh, fetched separately.
    pub meshes: Vec<String>,
    /// Dataset whose kinematics track animates the scene.
    pub animation_track: Option<String>,
    pub vertebrae: Vec<VertebraTransform>,
    pub layout: ChartLayout,
    pub primitives: Vec<Primitive>,
    pub glyphs: Vec<ForceGlyph>,
}

impl SceneDescription {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scene serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: SceneDescription = serde_json::from_str(text).map_err(|e| Error::format(None, format!("scene: {e}")))?;
        if scene.schema_version != SCHEMA_VERSION {
            return Err(Error::format(None, format!("unsupported scene schema {}", scene.schema_version)));
        }
        Ok(scene)
    }
}

/// Expansion offset of a joint: mean of its two vertebrae's offsets.
fn joint_offset(dataset: &SimulationDataset, vertebrae: &[VertebraPlacement], joint: &str) -> Vec3 {
    let offset = |id: &Option<String>| {
        id.as_ref()
            .and_then(|id| vertebrae.iter().find(|v| &v.id == id))
            .map_or(Vec3::zeros(), |v| v.offset)
    };
    dataset
        .registry
        .get(joint)
        .map_or(Vec3::zeros(), |j| 0.5 * (offset(&j.cranial) + offset(&j.caudal)))
}

/// Glyphs at `tick`, moved to the expanded spine. Empty without force
/// vectors or disc meshes.
fn expanded_glyphs(dataset: &SimulationDataset, vertebrae: &[VertebraPlacement], tick: usize, spacing: f64) -> Result<Vec<ForceGlyph>> {
    if !dataset.matrices.contains_key(&Attribute::ForceVector) {
        return Ok(Vec::new());
    }
    let Ok(config) = GlyphConfig::for_dataset(dataset, spacing) else {
        return Ok(Vec::new());
    };
    Ok(glyphs_at(dataset, tick, &config, Exec::default())?
        .into_iter()
        .map(|g| {
            let offset = joint_offset(dataset, vertebrae, &g.disc);
            g.translated(offset)
        })
        .collect())
}

/// Builds the scene served to the UI.
pub fn scene_json(dataset: &SimulationDataset, comparisons: &[&SimulationDataset], config: &ViewConfig, canvas: CanvasSize) -> Result<SceneDescription> {
    let config = config.normalized()?;
    let layout = layout_charts(dataset, comparisons, &config)?;
    let times = dataset.times();
    let tick = layout.cursor.as_ref().map_or_else(|| snap_tick(times, config.t), |c| c.tick);
    let t = times.get(tick).copied().unwrap_or(0.0);

    let vertebrae = layout
        .vertebrae
        .iter()
        .map(|v| {
            let pose = dataset
                .kinematics
                .as_ref()
                .and_then(|k| k.pose(tick, &v.id))
                .copied()
                .unwrap_or_else(crate::dataset::Pose::identity);
            VertebraTransform {
                id: v.id.clone(),
                rotation: pose.rotation_wxyz(),
                translation: pose.translation.into(),
                offset: v.offset.into(),
            }
        })
        .collect();
    let glyphs = if times.is_empty() { Vec::new() } else { expanded_glyphs(dataset, &layout.vertebrae, tick, config.spacing)? };

    Ok(SceneDescription {
        schema_version: SCHEMA_VERSION,
        dataset: dataset.id().to_string(),
        canvas,
        attributes: dataset.attributes(),
        time_range: [times.first().copied().unwrap_or(0.0), times.last().copied().unwrap_or(0.0)],
        tick,
        t,
        meshes: dataset.meshes.keys().cloned().collect(),
        animation_track: dataset.kinematics.as_ref().map(|_| dataset.id().to_string()),
        vertebrae,
        primitives: layout_primitives(&layout),
        layout,
        glyphs,
        config,
    })
}

/// Posterior glyph view at the tick nearest `config.t`: silhouettes of the
/// vertebra and disc meshes on the expanded spine plus the glyph set.
pub fn glyph_still(dataset: &SimulationDataset, config: &ViewConfig) -> Result<GlyphStill> {
    let config = config.normalized()?;
    let layout = layout_charts(dataset, &[], &ViewConfig { compare: Vec::new(), ..config.clone() })?;
    let times = dataset.times();
    let tick = snap_tick(times, config.t);
    let view = Vec3::z();
    let mut outlines = Vec::new();
    for s in dataset.registry.iter().filter(|s| matches!(s.kind, StructureKind::Vertebra | StructureKind::Disc)) {
        let Some(mesh) = dataset.meshes.get(&s.id) else { continue };
        let offset = match s.kind {
            StructureKind::Vertebra => layout.vertebrae.iter().find(|v| v.id == s.id).map_or(Vec3::zeros(), |v| v.offset),
            _ => joint_offset(dataset, &layout.vertebrae, &s.id),
        };
        for (a, b) in silhouette(mesh, &view) {
            let p = |i: usize| {
                let w = mesh.vertices[i] + offset;
                [w.x, -w.y]
            };
            outlines.push((s.id.clone(), [p(a), p(b)]));
        }
    }
    Ok(GlyphStill {
        t: times.get(tick).copied().unwrap_or(0.0),
        outlines,
        glyphs: if times.is_empty() { Vec::new() } else { expanded_glyphs(dataset, &layout.vertebrae, tick, config.spacing)? },
    })
}
