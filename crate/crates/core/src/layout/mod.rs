//! Anatomically aligned chart layout.
//!
//! Layout space is a canvas in millimetres: x grows to the viewer's right with
//! the spine's central axis at `x = 0`, y grows downward. The view is
//! posterior, so the patient's left is on the canvas left and world `(x, y)`
//! maps to canvas `(x, -y)`.
//!
//! Charts sit beside their structure: discs and right facets to the right of
//! the axis, left facets to the left with the time axis mirrored so time
//! always grows away from the spine. All charts share one value scale.

mod colormap;
mod config;
mod cursor;
mod overlay;
mod strips;

use serde::{Deserialize, Serialize};

pub use colormap::{bin_color, bin_edges, discretize, nice_range, value_color, viridis, viridis_table, Rgb};
pub use config::{StructureGroup, ViewConfig, ViewMode, DEFAULT_SIMPLIFIED_BINS, MAX_BINS};
pub use cursor::{snap_tick, time_cursor, Cursor, CursorMark, Label};
pub use overlay::{overlay_comparison, Overlay, OverlayMode, OverlaySpan};
pub use strips::{simplified_strips, Strip, StripCell};

use crate::dataset::{expected_kinds, Attribute, SimulationDataset, StructureKind, StructureRef, ValueMatrix};
use crate::geometry::{barycenter, silhouette};
use crate::{Error, Result, Vec3};

pub type Point = [f64; 2];

/// Central axis of the canvas.
pub const AXIS_X: f64 = 0.0;
/// Expansion unit G, mm per unit spacing and vertebra index.
pub const EXPANSION_UNIT: f64 = 20.0;
/// Distance between the axis and the near edge of a chart.
pub const CHART_INNER: f64 = 25.0;
pub const CHART_WIDTH: f64 = 120.0;
/// Chart height as a fraction of the vertical pitch between vertebrae.
pub const CHART_FILL: f64 = 0.8;
/// Vertebra pitch assumed when a dataset carries no vertebra meshes.
pub const DEFAULT_PITCH: f64 = 20.0;
/// Depth of the chart planes in the stacked 3D view.
pub const PLANE_Z: f64 = -30.0;

/// `2·axis_x − x`
pub fn mirror_x(x: f64, axis_x: f64) -> f64 {
    2.0 * axis_x - x
}

/// Translates vertebra `i` (0 = topmost) by `(0, −i·s·G, 0)` in world space.
pub fn expand_spine(positions: &[Vec3], spacing: f64, unit: f64) -> Vec<Vec3> {
    let s = spacing.clamp(0.0, 1.0);
    positions
        .iter()
        .enumerate()
        .map(|(i, p)| p - Vec3::new(0.0, i as f64 * s * unit, 0.0))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn of(kind: StructureKind) -> Side {
        match kind {
            StructureKind::FacetLeft => Side::Left,
            _ => Side::Right,
        }
    }
}

/// Maps values onto chart heights. Shared by every chart of a layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueScale {
    pub lo: f64,
    pub hi: f64,
    /// Height of `hi` above the baseline.
    pub height: f64,
}

impl ValueScale {
    pub fn height_of(&self, v: f64) -> f64 {
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0) * self.height
    }
}

/// Time and value axes of one chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartAxes {
    pub side: Side,
    pub t0: f64,
    pub t1: f64,
    pub baseline: f64,
}

impl ChartAxes {
    /// x of `t` on a right-side chart.
    fn right_x(&self, t: f64) -> f64 {
        let span = self.t1 - self.t0;
        let f = if span > 0.0 { ((t - self.t0) / span).clamp(0.0, 1.0) } else { 0.0 };
        AXIS_X + CHART_INNER + f * CHART_WIDTH
    }

    pub fn x(&self, t: f64) -> f64 {
        match self.side {
            Side::Right => self.right_x(t),
            Side::Left => mirror_x(self.right_x(t), AXIS_X),
        }
    }

    pub fn y(&self, v: f64, scale: &ValueScale) -> f64 {
        self.baseline - scale.height_of(v)
    }

    /// `[x0, y0, x1, y1]` with `x0 < x1`, `y0 < y1`.
    pub fn frame(&self, scale: &ValueScale) -> [f64; 4] {
        let (a, b) = (self.x(self.t0), self.x(self.t1));
        [a.min(b), self.baseline - scale.height, a.max(b), self.baseline]
    }
}

/// A vertebra in the chart window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertebraPlacement {
    pub id: String,
    pub index: usize,
    /// Anatomical barycenter, world mm.
    pub rest: Vec3,
    /// Expansion offset, world mm.
    pub offset: Vec3,
    /// Expanded barycenter on the canvas.
    pub center: Point,
    /// Projected silhouette segments on the canvas.
    pub outline: Vec<[Point; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub sample: usize,
    pub polygon: [Point; 4],
    pub color: Rgb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub structure: String,
    pub kind: StructureKind,
    pub side: Side,
    pub anchor: Point,
    pub axes: ChartAxes,
    pub frame: [f64; 4],
    /// No data for this structure; drawn as a hatched empty frame.
    pub missing: bool,
    /// Filled area per run of present samples.
    pub areas: Vec<Vec<Point>>,
    /// Top outline per run of present samples.
    pub lines: Vec<Vec<Point>>,
    pub colors: Vec<Option<Rgb>>,
    /// Per-sample fill between sample `k` and `k + 1`, colored by sample `k`.
    pub slices: Vec<Slice>,
    pub overlay: Option<Overlay>,
    pub strips: Vec<Strip>,
    pub gridlines: Vec<[Point; 2]>,
    /// World-space corners of the chart plane in the stacked 3D view.
    pub plane: Option<[Vec3; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartLayout {
    pub mode: ViewMode,
    pub attribute: Attribute,
    pub group: StructureGroup,
    pub spacing: f64,
    /// Ids of the datasets shown, primary first.
    pub datasets: Vec<String>,
    /// Color range and bin count.
    pub range: (f64, f64),
    pub bins: usize,
    pub scale: ValueScale,
    pub vertebrae: Vec<VertebraPlacement>,
    pub charts: Vec<Chart>,
    pub cursor: Option<Cursor>,
}

impl ChartLayout {
    pub fn chart(&self, structure: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.structure == structure)
    }

    pub fn shows_labels(&self) -> bool {
        self.mode != ViewMode::Simplified
    }
}

/// Time series of one structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub times: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl Series {
    pub fn of(matrix: &ValueMatrix, structure: &str) -> Option<Series> {
        Some(Series {
            times: matrix.times().to_vec(),
            values: matrix.series_by_id(structure)?,
        })
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::max)
    }
}

/// Structures of the group that the attribute reports on, in registry order.
fn charted_structures(dataset: &SimulationDataset, attribute: Attribute, group: StructureGroup) -> Vec<StructureRef> {
    let expected = expected_kinds(attribute);
    dataset
        .registry
        .iter()
        .filter(|s| group.kinds().contains(&s.kind) && expected.contains(&s.kind))
        .cloned()
        .collect()
}

/// Largest value over the charted structures of all datasets.
fn global_max(datasets: &[&SimulationDataset], attribute: Attribute, structures: &[StructureRef]) -> Option<f64> {
    datasets
        .iter()
        .filter_map(|d| d.matrices.get(&attribute))
        .flat_map(|m| structures.iter().filter_map(move |s| Series::of(m, &s.id)?.max()))
        .reduce(f64::max)
}

/// Vertebrae with their anatomical barycenters, expanded. Without meshes the
/// spine is laid out at [`DEFAULT_PITCH`].
fn place_vertebrae(dataset: &SimulationDataset, spacing: f64) -> Result<Vec<VertebraPlacement>> {
    let ids: Vec<String> = dataset.registry.vertebrae().map(|v| v.id.clone()).collect();
    let with_meshes = !ids.is_empty() && ids.iter().all(|id| dataset.meshes.contains_key(id));
    let rest: Vec<Vec3> = if with_meshes {
        ids.iter().map(|id| barycenter(&dataset.meshes[id])).collect::<Result<_>>()?
    } else {
        (0..ids.len()).map(|i| Vec3::new(0.0, -(i as f64) * DEFAULT_PITCH, 0.0)).collect()
    };
    let expanded = expand_spine(&rest, spacing, EXPANSION_UNIT);
    let view = Vec3::z();
    Ok(ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            let offset = expanded[i] - rest[i];
            let outline = dataset
                .meshes
                .get(&id)
                .map(|mesh| {
                    let p = |v: usize| {
                        let w = mesh.vertices[v] + offset;
                        [w.x, -w.y]
                    };
                    silhouette(mesh, &view).into_iter().map(|(a, b)| [p(a), p(b)]).collect()
                })
                .unwrap_or_default();
            VertebraPlacement {
                center: [expanded[i].x, -expanded[i].y],
                id,
                index: i,
                rest: rest[i],
                offset,
                outline,
            }
        })
        .collect())
}

/// Canvas y of a joint's anatomical anchor: the midpoint of its two
/// vertebrae's expanded barycenters.
pub fn anchor_y(vertebrae: &[VertebraPlacement], structure: &StructureRef) -> Result<f64> {
    let find = |id: &Option<String>| {
        id.as_ref()
            .and_then(|id| vertebrae.iter().find(|v| &v.id == id))
            .map(|v| v.center[1])
            .ok_or_else(|| Error::Geometry(format!("`{}` lacks an adjacent vertebra", structure.id)))
    };
    Ok(0.5 * (find(&structure.cranial)? + find(&structure.caudal)?))
}

fn chart_height(vertebrae: &[VertebraPlacement]) -> f64 {
    let pitch = vertebrae
        .windows(2)
        .map(|w| (w[1].center[1] - w[0].center[1]).abs())
        .reduce(f64::min)
        .unwrap_or(DEFAULT_PITCH);
    CHART_FILL * pitch.max(1.0)
}

/// Runs of consecutive present samples as `(first, last)` inclusive.
fn present_runs(values: &[Option<f64>]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (k, v) in values.iter().enumerate() {
        match (v.is_some(), start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                runs.push((s, k - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, values.len() - 1));
    }
    runs
}

/// Filled polygons, one per run of present samples, closed along the
/// baseline.
fn area_polygons(series: &Series, axes: &ChartAxes, scale: &ValueScale) -> Vec<Vec<Point>> {
    present_runs(&series.values)
        .into_iter()
        .map(|(a, b)| {
            let mut poly = Vec::with_capacity(b - a + 3);
            poly.push([axes.x(series.times[a]), axes.baseline]);
            for k in a..=b {
                poly.push([axes.x(series.times[k]), axes.y(series.values[k].unwrap(), scale)]);
            }
            poly.push([axes.x(series.times[b]), axes.baseline]);
            poly
        })
        .collect()
}

fn line_polylines(series: &Series, axes: &ChartAxes, scale: &ValueScale) -> Vec<Vec<Point>> {
    present_runs(&series.values)
        .into_iter()
        .map(|(a, b)| {
            (a..=b)
                .map(|k| [axes.x(series.times[k]), axes.y(series.values[k].unwrap(), scale)])
                .collect()
        })
        .collect()
}

struct Frame {
    vertebrae: Vec<VertebraPlacement>,
    structures: Vec<StructureRef>,
    range: (f64, f64),
    scale: ValueScale,
}

/// Everything shared by the chart and strip layouts.
fn frame(datasets: &[&SimulationDataset], config: &ViewConfig, auto_range: impl Fn(f64) -> (f64, f64)) -> Result<Frame> {
    let primary = datasets[0];
    let structures = charted_structures(primary, config.attribute, config.group);
    if !structures.is_empty() {
        primary.matrix(config.attribute)?;
    }
    let vertebrae = place_vertebrae(primary, config.spacing)?;
    let range = match config.range {
        Some([lo, hi]) => (lo, hi),
        None => auto_range(global_max(datasets, config.attribute, &structures).unwrap_or(0.0)),
    };
    let scale = ValueScale {
        lo: range.0,
        hi: range.1,
        height: chart_height(&vertebrae),
    };
    Ok(Frame {
        vertebrae,
        structures,
        range,
        scale,
    })
}

fn gridlines(frame: [f64; 4], scale: &ValueScale, axes: &ChartAxes) -> Vec<[Point; 2]> {
    (1..=4)
        .map(|k| {
            let y = axes.baseline - scale.height * k as f64 / 4.0;
            [[frame[0], y], [frame[2], y]]
        })
        .collect()
}

fn plane_corners(frame: [f64; 4]) -> [Vec3; 4] {
    let w = |x: f64, y: f64| Vec3::new(x, -y, PLANE_Z);
    [
        w(frame[0], frame[3]),
        w(frame[2], frame[3]),
        w(frame[2], frame[1]),
        w(frame[0], frame[1]),
    ]
}

/// Lays out one chart per charted structure of `dataset`.
///
/// In the simplified mode this is [`simplified_strips`] over the primary and
/// all comparison datasets. Otherwise a single comparison dataset is drawn
/// as a gray overlay. The cursor is placed at `config.t`.
pub fn layout_charts(dataset: &SimulationDataset, comparisons: &[&SimulationDataset], config: &ViewConfig) -> Result<ChartLayout> {
    let config = config.normalized()?;
    let mut all = vec![dataset];
    all.extend_from_slice(comparisons);
    if config.mode == ViewMode::Simplified {
        return simplified_strips(&all, &config);
    }
    let shown = if comparisons.is_empty() { &all[..1] } else { &all[..2] };
    let Frame {
        vertebrae,
        structures,
        range,
        scale,
    } = frame(shown, &config, |max| (0.0, if max > 0.0 { max } else { 1.0 }))?;
    let reference = shown.get(1).and_then(|d| d.matrices.get(&config.attribute));

    let mut charts = Vec::with_capacity(structures.len());
    for s in &structures {
        let side = Side::of(s.kind);
        let anchor = [AXIS_X, anchor_y(&vertebrae, s)?];
        let series = dataset.matrices.get(&config.attribute).and_then(|m| Series::of(m, &s.id));
        let times = dataset.matrix(config.attribute)?.times();
        let axes = ChartAxes {
            side,
            t0: times.first().copied().unwrap_or(0.0),
            t1: times.last().copied().unwrap_or(0.0),
            baseline: anchor[1] + 0.5 * scale.height,
        };
        let frame = axes.frame(&scale);
        let mut chart = Chart {
            structure: s.id.clone(),
            kind: s.kind,
            side,
            anchor,
            axes,
            frame,
            missing: true,
            areas: Vec::new(),
            lines: Vec::new(),
            colors: Vec::new(),
            slices: Vec::new(),
            overlay: None,
            strips: Vec::new(),
            gridlines: if config.gridlines { gridlines(frame, &scale, &axes) } else { Vec::new() },
            plane: (config.mode == ViewMode::Stacked3d).then(|| plane_corners(frame)),
        };
        if let Some(series) = series.filter(|s| s.values.iter().any(Option::is_some)) {
            chart.missing = false;
            chart.areas = area_polygons(&series, &axes, &scale);
            chart.lines = line_polylines(&series, &axes, &scale);
            chart.colors = series.values.iter().map(|v| v.map(|v| value_color(v, range, config.bins))).collect();
            for k in 0..series.values.len().saturating_sub(1) {
                if let (Some(a), Some(b), Some(color)) = (series.values[k], series.values[k + 1], chart.colors[k]) {
                    let (xa, xb) = (axes.x(series.times[k]), axes.x(series.times[k + 1]));
                    chart.slices.push(Slice {
                        sample: k,
                        polygon: [[xa, axes.baseline], [xa, axes.y(a, &scale)], [xb, axes.y(b, &scale)], [xb, axes.baseline]],
                        color,
                    });
                }
            }
            if let Some(reference) = reference.and_then(|m| Series::of(m, &s.id)) {
                chart.overlay = Some(overlay_comparison(&series, &reference, &axes, &scale)?);
            }
        }
        charts.push(chart);
    }

    let mut layout = ChartLayout {
        mode: config.mode,
        attribute: config.attribute,
        group: config.group,
        spacing: config.spacing,
        datasets: shown.iter().map(|d| d.id().to_string()).collect(),
        range,
        bins: config.bins,
        scale,
        vertebrae,
        charts,
        cursor: None,
    };
    if !layout.charts.is_empty() {
        layout.cursor = Some(time_cursor(&layout, dataset, config.t)?);
    }
    Ok(layout)
}
