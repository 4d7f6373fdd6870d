//! Core library of the spine visualization workbench.
//!
//! The crate is organised along the data flow of the tool:
//!
//! * [`dataset`] parses and validates simulation output (value matrices,
//!   kinematics, meshes) and the manifest tying them together.
//! * [`sim`] is a small multibody spine model that writes datasets in the
//!   same format, used for end-to-end checks.
//! * [`geometry`] holds frame corrections, barycenters, silhouettes and
//!   mesh/plane isolines.
//! * [`layout`] computes the anatomically aligned chart geometry and the
//!   colormap, [`glyphs`] the force-direction glyphs.
//! * [`export`] turns layouts into SVG documents and scene descriptions.
//!
//! Batch work (simulation sweeps, glyph scrubs, per-structure layout) runs on
//! rayon when the `parallel` feature is enabled and sequentially otherwise;
//! see [`par`].

pub mod dataset;
pub mod error;
pub mod export;
pub mod geometry;
pub mod glyphs;
pub mod layout;
pub mod par;
pub mod sim;

pub use error::{Error, Result};

/// Shorthand for the vector type used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
