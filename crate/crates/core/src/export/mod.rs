//! Draw primitives, SVG rendering and the scene description served to the
//! browser UI.
//!
//! Primitives are emitted in a fixed z-order (see [`Layer`]); within a layer
//! they keep chart order. Coordinates stay in layout space. The SVG writer
//! wraps them in a single uniform transform, so a left chart's coordinates
//! are the exact negation of its right-side twin in the document too.

mod primitives;
mod scene;
mod svg;

pub use primitives::{glyph_primitives, layout_primitives, GlyphStill, Layer, Primitive};
pub use scene::{glyph_still, scene_json, CanvasSize, SceneDescription, VertebraTransform, SCHEMA_VERSION};
pub use svg::{export_glyph_svg, export_svg, fmt4};
