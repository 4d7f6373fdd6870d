use std::fmt::Write as _;

use super::primitives::{glyph_primitives, layout_primitives, GlyphStill, Primitive};
use super::CanvasSize;
use crate::layout::{ChartLayout, Point};
use crate::{Error, Result};

const MARGIN: f64 = 10.0;

/// Fixed 4-decimal formatting with negative zero printed as zero.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn points(pts: &[Point]) -> String {
    let mut s = String::new();
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", fmt4(p[0]), fmt4(p[1]));
    }
    s
}

fn structure_attr(s: Option<&str>) -> String {
    s.map(|s| format!(r#" data-structure="{}""#, escape(s))).unwrap_or_default()
}

/// Uniform scale and offset that fit `prims` into the canvas, keeping the
/// central axis at the horizontal centre.
fn fit(prims: &[Primitive], size: CanvasSize) -> (f64, f64, f64) {
    let (mut half, mut y0, mut y1) = (1.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for p in prims.iter().flat_map(Primitive::points) {
        half = half.max(p[0].abs());
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    let w = size.width as f64 - 2.0 * MARGIN;
    let h = size.height as f64 - 2.0 * MARGIN;
    let k = (w / (2.0 * half)).min(h / (y1 - y0).max(1.0)).max(1e-6);
    (k, 0.5 * size.width as f64, MARGIN - y0 * k)
}

fn render(prims: &[Primitive], size: CanvasSize, title: &str) -> Result<Vec<u8>> {
    if size.width == 0 || size.height == 0 {
        return Err(Error::Parameter(format!("canvas must be non-empty, got {}x{}", size.width, size.height)));
    }
    let (k, cx, cy) = fit(prims, size);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = size.width,
        h = size.height
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    s.push_str(concat!(
        "<defs><pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"2\" height=\"2\" patternTransform=\"rotate(45)\">",
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"2\" stroke=\"#a0a0a0\" stroke-width=\"0.6\"/></pattern></defs>\n"
    ));
    let _ = writeln!(s, r##"<rect width="{}" height="{}" fill="#ffffff"/>"##, size.width, size.height);
    let _ = writeln!(s, r#"<g transform="translate({} {}) scale({})">"#, fmt4(cx), fmt4(cy), fmt4(k));
    for p in prims {
        match p {
            Primitive::Polygon { class, structure, points: pts, fill, stroke, opacity, .. } => {
                let _ = write!(s, r#"<polygon class="{class}"{} points="{}" fill="{fill}""#, structure_attr(structure.as_deref()), points(pts));
                if let Some(st) = stroke {
                    let _ = write!(s, r#" stroke="{st}" stroke-width="0.2""#);
                }
                if *opacity < 1.0 {
                    let _ = write!(s, r#" fill-opacity="{}""#, fmt4(*opacity));
                }
                s.push_str("/>\n");
            }
            Primitive::Polyline { class, structure, points: pts, stroke, width, opacity, .. } => {
                let _ = write!(
                    s,
                    r#"<polyline class="{class}"{} points="{}" fill="none" stroke="{stroke}" stroke-width="{}""#,
                    structure_attr(structure.as_deref()),
                    points(pts),
                    fmt4(*width)
                );
                if *opacity < 1.0 {
                    let _ = write!(s, r#" stroke-opacity="{}""#, fmt4(*opacity));
                }
                s.push_str("/>\n");
            }
            Primitive::Rect { class, structure, x, y, width, height, fill, stroke, .. } => {
                let _ = write!(
                    s,
                    r#"<rect class="{class}"{} x="{}" y="{}" width="{}" height="{}" fill="{fill}""#,
                    structure_attr(structure.as_deref()),
                    fmt4(*x),
                    fmt4(*y),
                    fmt4(*width),
                    fmt4(*height)
                );
                if let Some(st) = stroke {
                    let _ = write!(s, r#" stroke="{st}" stroke-width="0.2""#);
                }
                s.push_str("/>\n");
            }
            Primitive::Text { class, structure, position, text, anchor, .. } => {
                let _ = writeln!(
                    s,
                    r#"<text class="{class}"{} x="{}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="3.0000">{}</text>"#,
                    structure_attr(structure.as_deref()),
                    fmt4(position[0]),
                    fmt4(position[1]),
                    escape(text)
                );
            }
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s.into_bytes())
}

/// Renders a chart layout. The output is a pure function of the inputs.
pub fn export_svg(layout: &ChartLayout, size: CanvasSize) -> Result<Vec<u8>> {
    let title = format!("{} {:?} {}", layout.datasets.join(" vs "), layout.mode, layout.attribute);
    render(&layout_primitives(layout), size, &title)
}

/// Renders a glyph still in posterior projection.
pub fn export_glyph_svg(still: &GlyphStill, size: CanvasSize) -> Result<Vec<u8>> {
    render(&glyph_primitives(still), size, &format!("glyphs t={}", fmt4(still.t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_decimals() {
        assert_eq!(fmt4(1.0), "1.0000");
        assert_eq!(fmt4(-0.00001), "0.0000");
        assert_eq!(fmt4(-2.5), "-2.5000");
        assert_eq!(fmt4(1.23456), "1.2346");
    }

    #[test]
    fn zero_canvas_is_rejected() {
        let r = render(&[], CanvasSize { width: 0, height: 100 }, "x");
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
