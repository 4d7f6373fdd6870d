use serde::{Deserialize, Serialize};

use crate::glyphs::ForceGlyph;
use crate::layout::{ChartLayout, OverlayMode, Point, Side};

/// Drawing layers, back to front.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Spine,
    Frame,
    Grid,
    Fill,
    Reference,
    Emphasis,
    Outline,
    Cursor,
    Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Primitive {
    Polygon {
        layer: Layer,
        class: String,
        structure: Option<String>,
        points: Vec<Point>,
        fill: String,
        stroke: Option<String>,
        opacity: f64,
    },
    Polyline {
        layer: Layer,
        class: String,
        structure: Option<String>,
        points: Vec<Point>,
        stroke: String,
        width: f64,
        opacity: f64,
    },
    Rect {
        layer: Layer,
        class: String,
        structure: Option<String>,
        x: f64,
        y: f64,
        width: f64,
        height: f64,
        fill: String,
        stroke: Option<String>,
    },
    Text {
        layer: Layer,
        class: String,
        structure: Option<String>,
        position: Point,
        text: String,
        anchor: String,
    },
}

impl Primitive {
    pub fn layer(&self) -> Layer {
        match self {
            Primitive::Polygon { layer, .. }
            | Primitive::Polyline { layer, .. }
            | Primitive::Rect { layer, .. }
            | Primitive::Text { layer, .. } => *layer,
        }
    }

    pub fn class(&self) -> &str {
        match self {
            Primitive::Polygon { class, .. }
            | Primitive::Polyline { class, .. }
            | Primitive::Rect { class, .. }
            | Primitive::Text { class, .. } => class,
        }
    }

    pub fn structure(&self) -> Option<&str> {
        match self {
            Primitive::Polygon { structure, .. }
            | Primitive::Polyline { structure, .. }
            | Primitive::Rect { structure, .. }
            | Primitive::Text { structure, .. } => structure.as_deref(),
        }
    }

    /// Every coordinate the primitive touches.
    pub fn points(&self) -> Vec<Point> {
        match self {
            Primitive::Polygon { points, .. } | Primitive::Polyline { points, .. } => points.clone(),
            Primitive::Rect { x, y, width, height, .. } => vec![[*x, *y], [x + width, y + height]],
            Primitive::Text { position, .. } => vec![*position],
        }
    }
}

pub const SPINE_STROKE: &str = "#404040";
pub const REFERENCE_FILL: &str = "#808080";
pub const LINE_STROKE: &str = "#202020";
pub const HATCH_FILL: &str = "url(#hatch)";

fn sorted(mut out: Vec<Primitive>) -> Vec<Primitive> {
    out.sort_by_key(Primitive::layer);
    out
}

fn polyline(layer: Layer, class: &str, structure: Option<&str>, points: Vec<Point>, stroke: &str, width: f64) -> Primitive {
    Primitive::Polyline {
        layer,
        class: class.into(),
        structure: structure.map(Into::into),
        points,
        stroke: stroke.into(),
        width,
        opacity: 1.0,
    }
}

/// Primitives of a chart layout in z-order. The simplified view yields only
/// spine outlines, frames, strips and the cursor line.
pub fn layout_primitives(layout: &ChartLayout) -> Vec<Primitive> {
    let mut out = Vec::new();
    for v in &layout.vertebrae {
        for seg in &v.outline {
            out.push(polyline(Layer::Spine, "spine", Some(&v.id), seg.to_vec(), SPINE_STROKE, 0.3));
        }
    }
    for c in &layout.charts {
        let s = Some(c.structure.clone());
        let [x0, y0, x1, y1] = c.frame;
        out.push(Primitive::Rect {
            layer: Layer::Frame,
            class: if c.missing { "frame missing" } else { "frame" }.into(),
            structure: s.clone(),
            x: x0,
            y: y0,
            width: x1 - x0,
            height: y1 - y0,
            fill: if c.missing { HATCH_FILL } else { "none" }.into(),
            stroke: Some("#b0b0b0".into()),
        });
        // time axis, starting at the spine side
        let (near, far) = match c.side {
            Side::Right => (x0, x1),
            Side::Left => (x1, x0),
        };
        out.push(polyline(Layer::Frame, "axis", Some(&c.structure), vec![[near, y1], [far, y1]], "#909090", 0.2));
        for g in &c.gridlines {
            out.push(polyline(Layer::Grid, "grid", Some(&c.structure), g.to_vec(), "#d0d0d0", 0.1));
        }
        for strip in &c.strips {
            for cell in &strip.cells {
                out.push(Primitive::Rect {
                    layer: Layer::Fill,
                    class: "strip".into(),
                    structure: s.clone(),
                    x: cell.x0,
                    y: strip.y0,
                    width: cell.x1 - cell.x0,
                    height: strip.y1 - strip.y0,
                    fill: cell.color.map_or_else(|| HATCH_FILL.to_string(), |c| c.to_hex()),
                    stroke: None,
                });
            }
        }
        for slice in &c.slices {
            out.push(Primitive::Polygon {
                layer: Layer::Fill,
                class: "slice".into(),
                structure: s.clone(),
                points: slice.polygon.to_vec(),
                fill: slice.color.to_hex(),
                // closes antialiasing seams between neighbouring slices
                stroke: Some(slice.color.to_hex()),
                opacity: 1.0,
            });
        }
        for area in &c.areas {
            out.push(Primitive::Polygon {
                layer: Layer::Outline,
                class: "area".into(),
                structure: s.clone(),
                points: area.clone(),
                fill: "none".into(),
                stroke: Some(LINE_STROKE.into()),
                opacity: 1.0,
            });
        }
        if let Some(o) = &c.overlay {
            for poly in &o.reference {
                out.push(Primitive::Polygon {
                    layer: Layer::Reference,
                    class: "reference".into(),
                    structure: s.clone(),
                    points: poly.clone(),
                    fill: REFERENCE_FILL.into(),
                    stroke: None,
                    opacity: 0.6,
                });
            }
            for span in &o.spans {
                match span.mode {
                    OverlayMode::Area => {
                        for slice in c.slices.iter().filter(|sl| sl.sample >= span.first && sl.sample <= span.last) {
                            out.push(Primitive::Polygon {
                                layer: Layer::Emphasis,
                                class: "slice emphasis".into(),
                                structure: s.clone(),
                                points: slice.polygon.to_vec(),
                                fill: slice.color.to_hex(),
                                stroke: Some(slice.color.to_hex()),
                                opacity: 1.0,
                            });
                        }
                    }
                    OverlayMode::Line | OverlayMode::Gap => {}
                }
            }
        }
    }
    if let Some(cursor) = &layout.cursor {
        for m in &cursor.marks {
            out.push(polyline(Layer::Cursor, "cursor", Some(&m.structure), m.line.to_vec(), "#000000", 0.4));
            if let Some(l) = &m.label {
                out.push(Primitive::Text {
                    layer: Layer::Label,
                    class: "label".into(),
                    structure: Some(m.structure.clone()),
                    position: l.position,
                    text: l.text.clone(),
                    anchor: l.anchor.clone(),
                });
            }
        }
    }
    sorted(out)
}

/// Orthographic posterior projection of a glyph view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphStill {
    pub t: f64,
    /// Silhouette segments of vertebra and disc meshes.
    pub outlines: Vec<(String, [Point; 2])>,
    pub glyphs: Vec<ForceGlyph>,
}

fn project(p: &crate::Vec3) -> Point {
    [p.x, -p.y]
}

pub fn glyph_primitives(still: &GlyphStill) -> Vec<Primitive> {
    let mut out = Vec::new();
    for (id, seg) in &still.outlines {
        out.push(polyline(Layer::Spine, "spine", Some(id), seg.to_vec(), SPINE_STROKE, 0.3));
    }
    for g in &still.glyphs {
        let s = Some(g.disc.as_str());
        if let Some(tr) = &g.trajectory {
            for (q, o) in tr.quads.iter().zip(&tr.opacity) {
                out.push(Primitive::Polygon {
                    layer: Layer::Reference,
                    class: "trajectory".into(),
                    structure: s.map(Into::into),
                    points: q.iter().map(project).collect(),
                    fill: "#3b528b".into(),
                    stroke: None,
                    opacity: 0.25 * (o[0] + o[2]),
                });
            }
        }
        if let Some(iso) = &g.isolines {
            for line in &iso.polylines {
                let mut pts: Vec<Point> = line.points.iter().map(project).collect();
                if line.closed {
                    pts.push(pts[0]);
                }
                out.push(polyline(Layer::Outline, "isoline", s, pts, "#21918c", 0.25));
            }
        }
        if let Some(p) = &g.plane {
            out.push(Primitive::Polygon {
                layer: Layer::Emphasis,
                class: "plane".into(),
                structure: s.map(Into::into),
                points: p.rim(32).iter().map(project).collect(),
                fill: "#5ec962".into(),
                stroke: Some("#2a7a3a".into()),
                opacity: 0.5,
            });
        }
        if let Some(a) = &g.arrow {
            out.push(polyline(Layer::Cursor, "arrow", s, vec![project(&a.tail), project(&a.tip)], "#d62728", 0.8));
        }
    }
    sorted(out)
}
