use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, StructureKind};
use crate::{Error, Result};

/// Bin count used by the simplified view when none is configured.
pub const DEFAULT_SIMPLIFIED_BINS: usize = 4;
pub const MAX_BINS: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewMode {
    #[default]
    Charts2d,
    Stacked3d,
    Simplified,
}

impl std::str::FromStr for ViewMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "charts2d" | "charts" => Ok(ViewMode::Charts2d),
            "stacked3d" | "stacked" => Ok(ViewMode::Stacked3d),
            "simplified" => Ok(ViewMode::Simplified),
            _ => Err(Error::Query(format!("unknown view mode `{s}`"))),
        }
    }
}

/// Which joints get charts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureGroup {
    #[default]
    Discs,
    Facets,
}

impl StructureGroup {
    pub fn kinds(self) -> &'static [StructureKind] {
        match self {
            StructureGroup::Discs => &[StructureKind::Disc],
            StructureGroup::Facets => &[StructureKind::FacetLeft, StructureKind::FacetRight],
        }
    }
}

impl std::str::FromStr for StructureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discs" | "disc" => Ok(StructureGroup::Discs),
            "facets" | "facet" => Ok(StructureGroup::Facets),
            _ => Err(Error::Query(format!("unknown structure group `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewConfig {
    pub mode: ViewMode,
    /// Spine expansion in `[0, 1]`.
    pub spacing: f64,
    /// Selected time, s.
    pub t: f64,
    pub attribute: Attribute,
    pub group: StructureGroup,
    /// Value range `[lo, hi]`; automatic when absent.
    pub range: Option<[f64; 2]>,
    /// Colormap bins, 0 for continuous.
    pub bins: usize,
    pub gridlines: bool,
    /// Comparison dataset ids. One id overlays it in gray; more than one
    /// switches to the simplified view.
    pub compare: Vec<String>,
}

impl Default for ViewConfig {
    fn default() -> Self {
        ViewConfig {
            mode: ViewMode::Charts2d,
            spacing: 0.5,
            t: 0.0,
            attribute: Attribute::ForceMagnitude,
            group: StructureGroup::Discs,
            range: None,
            bins: 0,
            gridlines: false,
            compare: Vec::new(),
        }
    }
}

impl ViewConfig {
    /// Clamps spacing, checks bins and range, and applies mode rules.
    pub fn normalized(&self) -> Result<ViewConfig> {
        let mut c = self.clone();
        c.spacing = if c.spacing.is_nan() { 0.0 } else { c.spacing.clamp(0.0, 1.0) };
        if c.t.is_nan() {
            return Err(Error::Parameter("t is NaN".into()));
        }
        if c.bins == 1 || c.bins > MAX_BINS {
            return Err(Error::Parameter(format!("bins must be 0 or 2..={MAX_BINS}, got {}", c.bins)));
        }
        if let Some([lo, hi]) = c.range {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Parameter(format!("empty value range [{lo}, {hi}]")));
            }
        }
        if c.compare.len() > 1 {
            c.mode = ViewMode::Simplified;
        }
        if c.mode == ViewMode::Simplified && c.bins == 0 {
            c.bins = DEFAULT_SIMPLIFIED_BINS;
        }
        Ok(c)
    }
}
