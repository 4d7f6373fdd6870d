//! Force-direction glyphs: a uniform-length arrow aimed at the disc
//! barycenter, a force-plane disc at its tip, isolines on the disc surface
//! and a fading trajectory strip.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, Mesh, SimulationDataset, StructureKind};
use crate::geometry::{self, barycenter, isolines, orthonormal_basis, to_local_force, IsolineSet};
use crate::par::Exec;
use crate::{Error, Result, Vec3};

/// Forces below this magnitude (N) have no direction; their glyph is hidden.
pub const FORCE_EPSILON: f64 = 1e-9;
/// Arrows and planes are drawn only when the spine is expanded beyond this.
pub const VISIBILITY_SPACING: f64 = 0.15;
pub const DEFAULT_WINDOW: f64 = 0.5;
pub const DEFAULT_ISOLINE_LEVELS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphConfig {
    pub spacing: f64,
    /// Uniform arrow length, mm.
    pub arrow_length: f64,
    /// Distance between arrow tip and barycenter, mm.
    pub gap: f64,
    pub plane_radius: f64,
    pub isoline_levels: usize,
    /// Trajectory window, s.
    pub window: f64,
}

impl GlyphConfig {
    /// Arrow length 1.5× the mean disc radius, tip gap 0.25 L, plane radius
    /// 0.8 L.
    pub fn from_disc_radius(mean_radius: f64, spacing: f64) -> Self {
        let arrow_length = 1.5 * mean_radius;
        GlyphConfig {
            spacing,
            arrow_length,
            gap: 0.25 * arrow_length,
            plane_radius: 0.8 * arrow_length,
            isoline_levels: DEFAULT_ISOLINE_LEVELS,
            window: DEFAULT_WINDOW,
        }
    }

    /// Derives the arrow length from the mean radius of all disc meshes of
    /// a dataset.
    pub fn for_dataset(dataset: &SimulationDataset, spacing: f64) -> Result<Self> {
        let radii: Vec<f64> = dataset
            .registry
            .of_kind(StructureKind::Disc)
            .filter_map(|d| dataset.meshes.get(&d.id))
            .map(geometry::mean_radius)
            .collect::<Result<_>>()?;
        if radii.is_empty() {
            return Err(Error::Query(format!("dataset `{}` has no disc meshes", dataset.id())));
        }
        Ok(Self::from_disc_radius(radii.iter().sum::<f64>() / radii.len() as f64, spacing))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub tail: Vec3,
    pub tip: Vec3,
}

impl Arrow {
    pub fn length(&self) -> f64 {
        (self.tip - self.tail).norm()
    }

    pub fn direction(&self) -> Vec3 {
        (self.tip - self.tail).normalize()
    }
}

/// Disc in the force plane, centred at the arrow tip. `u` and `v` span the
/// plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneDisc {
    pub center: Vec3,
    pub normal: Vec3,
    pub radius: f64,
    pub u: Vec3,
    pub v: Vec3,
}

impl PlaneDisc {
    /// Points on the rim, counter-clockwise around `normal`.
    pub fn rim(&self, segments: usize) -> Vec<Vec3> {
        (0..segments)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / segments as f64;
                self.center + (self.u * a.cos() + self.v * a.sin()) * self.radius
            })
            .collect()
    }
}

/// Ruled strip swept by consecutive arrows, fading toward the past.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStrip {
    /// `[tail_k, tip_k, tip_k+1, tail_k+1]`
    pub quads: Vec<[Vec3; 4]>,
    pub opacity: Vec<[f64; 4]>,
    /// Sum of angles between consecutive directions, degrees.
    pub swept_angle: f64,
}

impl TrajectoryStrip {
    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceGlyph {
    pub disc: String,
    pub t: f64,
    /// Force in the fixed display frame, `φᵀ f`.
    pub local_force: Vec3,
    pub visible: bool,
    pub arrow: Option<Arrow>,
    pub plane: Option<PlaneDisc>,
    pub isolines: Option<IsolineSet>,
    pub trajectory: Option<TrajectoryStrip>,
    /// Angle between the force and the downward disc axis, degrees.
    pub shear_angle: Option<f64>,
}

impl ForceGlyph {
    pub fn translated(&self, offset: Vec3) -> ForceGlyph {
        let mut g = self.clone();
        if let Some(a) = &mut g.arrow {
            a.tail += offset;
            a.tip += offset;
        }
        if let Some(p) = &mut g.plane {
            p.center += offset;
        }
        g.isolines = g.isolines.map(|i| i.translated(offset));
        if let Some(tr) = &mut g.trajectory {
            for q in &mut tr.quads {
                for p in q {
                    *p += offset;
                }
            }
        }
        g
    }
}

/// Arrow ending `gap` before `target`, pointing along the unit `direction`.
pub fn arrow_toward(target: Vec3, direction: Vec3, config: &GlyphConfig) -> Arrow {
    let tip = target - direction * config.gap;
    Arrow {
        tip,
        tail: tip - direction * config.arrow_length,
    }
}

/// Builds the glyph of one disc at one instant from a global force and the
/// rotation `phi` of the body the force is reported against.
pub fn build_glyph(disc_mesh: &Mesh, f_global: Vec3, phi: &Matrix3<f64>, t: f64, config: &GlyphConfig) -> Result<ForceGlyph> {
    let local = to_local_force(f_global, phi)?;
    let mut glyph = ForceGlyph {
        disc: disc_mesh.owner.clone(),
        t,
        local_force: local,
        visible: false,
        arrow: None,
        plane: None,
        isolines: None,
        trajectory: None,
        shear_angle: None,
    };
    let magnitude = local.norm();
    if !(magnitude >= FORCE_EPSILON) {
        return Ok(glyph);
    }
    let direction = local / magnitude;
    let center = barycenter(disc_mesh)?;
    // isolines stay available with the spine collapsed
    glyph.isolines = Some(isolines(disc_mesh, center, direction, config.isoline_levels));
    if config.spacing > VISIBILITY_SPACING {
        let arrow = arrow_toward(center, direction, config);
        let (u, v) = orthonormal_basis(&direction);
        glyph.plane = Some(PlaneDisc {
            center: arrow.tip,
            normal: direction,
            radius: config.plane_radius,
            u,
            v,
        });
        glyph.arrow = Some(arrow);
        glyph.visible = true;
    }
    Ok(glyph)
}

/// Angle in degrees between a force and the downward disc axis `-axis`:
/// 0° for purely axial impact, 90° for pure shear. `None` when the force is
/// too small to have a direction.
pub fn shear_angle(force: &Vec3, axis: &Vec3) -> Option<f64> {
    if !(force.norm() >= FORCE_EPSILON) {
        return None;
    }
    let down = -axis;
    Some(force.cross(&down).norm().atan2(force.dot(&down)).to_degrees())
}

/// Mean normal of the triangles of `mesh` facing `toward` within 45°.
fn endplate_normal(mesh: &Mesh, toward: &Vec3) -> Option<Vec3> {
    let cos45 = std::f64::consts::FRAC_1_SQRT_2;
    let sum = (0..mesh.triangles.len())
        .map(|i| mesh.normal(i))
        .filter(|n| n.norm() > 0.0 && n.dot(toward) >= cos45 * n.norm())
        .fold(Vec3::zeros(), |acc, n| acc + n);
    (sum.norm() > 0.0).then(|| sum.normalize())
}

/// Disc axis pointing cranially: average of the endplate normals of the two
/// adjacent vertebrae, both oriented toward the cranial vertebra.
pub fn disc_axis(cranial: &Mesh, caudal: &Mesh) -> Result<Vec3> {
    let up = barycenter(cranial)? - barycenter(caudal)?;
    if up.norm() == 0.0 {
        return Err(Error::Geometry("coincident vertebra barycenters".into()));
    }
    let up = up.normalize();
    let lower = endplate_normal(cranial, &-up).map(|n| -n).unwrap_or(up);
    let upper = endplate_normal(caudal, &up).unwrap_or(up);
    let axis = lower + upper;
    Ok(if axis.norm() > 0.0 { axis.normalize() } else { up })
}

/// One arrow of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrowSample {
    pub t: f64,
    pub arrow: Arrow,
}

/// Ruled strip between consecutive arrows whose time lies in
/// `[t − window, t]`. Opacity falls linearly from 1 at `t` to 0 at
/// `t − window`.
pub fn trajectory_surface(samples: &[ArrowSample], t: f64, window: f64) -> TrajectoryStrip {
    let inside: Vec<&ArrowSample> = samples
        .iter()
        .filter(|s| s.t <= t + 1e-12 && s.t >= t - window - 1e-12)
        .collect();
    if inside.len() < 2 {
        return TrajectoryStrip::default();
    }
    let fade = |ts: f64| if window > 0.0 { (1.0 - (t - ts) / window).clamp(0.0, 1.0) } else { 1.0 };
    let mut strip = TrajectoryStrip::default();
    for w in inside.windows(2) {
        let (a, b) = (w[0], w[1]);
        strip.quads.push([a.arrow.tail, a.arrow.tip, b.arrow.tip, b.arrow.tail]);
        let (oa, ob) = (fade(a.t), fade(b.t));
        strip.opacity.push([oa, oa, ob, ob]);
        let (da, db) = (a.arrow.direction(), b.arrow.direction());
        strip.swept_angle += da.cross(&db).norm().atan2(da.dot(&db)).to_degrees();
    }
    strip
}

/// Glyphs of every disc with a mesh at one tick, built concurrently.
///
/// Forces come from the `force_vector` matrix; the frame correction uses the
/// cranial vertebra's rotation at that tick (identity without kinematics).
pub fn glyphs_at(dataset: &SimulationDataset, tick: usize, config: &GlyphConfig, exec: Exec) -> Result<Vec<ForceGlyph>> {
    let forces = dataset.matrix(Attribute::ForceVector)?;
    if tick >= forces.rows() {
        return Err(Error::Query(format!("tick {tick} outside 0..{}", forces.rows())));
    }
    let discs: Vec<_> = dataset
        .registry
        .of_kind(StructureKind::Disc)
        .filter(|d| dataset.meshes.contains_key(&d.id) && forces.column(&d.id).is_some())
        .cloned()
        .collect();

    let rotation = |row: usize, vertebra: Option<&String>| -> Matrix3<f64> {
        dataset
            .kinematics
            .as_ref()
            .zip(vertebra)
            .and_then(|(k, v)| k.pose(row, v))
            .map(|p| p.rotation.to_rotation_matrix().into_inner())
            .unwrap_or_else(Matrix3::identity)
    };

    exec.map(&discs, |disc| {
        let mesh = &dataset.meshes[&disc.id];
        let col = forces.column(&disc.id).unwrap();
        let t = forces.times()[tick];
        let Some(f) = forces.get_vector(tick, col) else {
            return Ok(ForceGlyph {
                disc: disc.id.clone(),
                t,
                local_force: Vec3::zeros(),
                visible: false,
                arrow: None,
                plane: None,
                isolines: None,
                trajectory: None,
                shear_angle: None,
            });
        };
        let mut glyph = build_glyph(mesh, f, &rotation(tick, disc.cranial.as_ref()), t, config)?;
        if glyph.isolines.is_none() {
            return Ok(glyph);
        }
        if let (Some(cr), Some(ca)) = (
            disc.cranial.as_ref().and_then(|v| dataset.meshes.get(v)),
            disc.caudal.as_ref().and_then(|v| dataset.meshes.get(v)),
        ) {
            glyph.shear_angle = shear_angle(&glyph.local_force, &disc_axis(cr, ca)?);
        }
        if glyph.visible {
            let center = barycenter(mesh)?;
            let first = forces.times().partition_point(|&s| s < t - config.window - 1e-12);
            let mut samples = Vec::new();
            for row in first..=tick {
                let Some(f) = forces.get_vector(row, col) else { continue };
                let local = to_local_force(f, &rotation(row, disc.cranial.as_ref()))?;
                if local.norm() >= FORCE_EPSILON {
                    samples.push(ArrowSample {
                        t: forces.times()[row],
                        arrow: arrow_toward(center, local.normalize(), config),
                    });
                }
            }
            glyph.trajectory = Some(trajectory_surface(&samples, t, config.window));
        }
        Ok(glyph)
    })
    .into_iter()
    .collect()
}

/// Glyphs of every tick, ticks spread over `exec`.
pub fn scrub(dataset: &SimulationDataset, config: &GlyphConfig, exec: Exec) -> Result<Vec<Vec<ForceGlyph>>> {
    let ticks = dataset.matrix(Attribute::ForceVector)?.rows();
    exec.map_range(ticks, |tick| glyphs_at(dataset, tick, config, Exec::Sequential))
        .into_iter()
        .collect()
}
