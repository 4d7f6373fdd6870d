use serde::{Deserialize, Serialize};

use super::{present_runs, ChartAxes, Point, Series, ValueScale};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OverlayMode {
    /// Reference above primary: primary drawn as a line inside the gray area.
    Line,
    /// Primary filled on top of the gray area.
    Area,
    /// Either sample is missing.
    Gap,
}

/// Contiguous samples `first..=last` sharing a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlaySpan {
    pub mode: OverlayMode,
    pub first: usize,
    pub last: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub modes: Vec<OverlayMode>,
    pub spans: Vec<OverlaySpan>,
    /// Gray reference area, one polygon per run of present samples.
    pub reference: Vec<Vec<Point>>,
    /// Primary outline over each `Line` span, reaching to the next sample.
    pub lines: Vec<Vec<Point>>,
}

/// Compares a primary series against a reference drawn in gray on top.
/// A sample is `Line` when the reference is strictly greater, else `Area`.
pub fn overlay_comparison(primary: &Series, reference: &Series, axes: &ChartAxes, scale: &ValueScale) -> Result<Overlay> {
    let same_base = primary.times.len() == reference.times.len()
        && primary
            .times
            .iter()
            .zip(&reference.times)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(1.0));
    if !same_base {
        return Err(Error::Query("comparison dataset has a different time base".into()));
    }
    let modes: Vec<OverlayMode> = primary
        .values
        .iter()
        .zip(&reference.values)
        .map(|(p, r)| match (p, r) {
            (Some(p), Some(r)) if r > p => OverlayMode::Line,
            (Some(_), Some(_)) => OverlayMode::Area,
            _ => OverlayMode::Gap,
        })
        .collect();
    let mut spans: Vec<OverlaySpan> = Vec::new();
    for (k, &mode) in modes.iter().enumerate() {
        match spans.last_mut() {
            Some(s) if s.mode == mode => s.last = k,
            _ => spans.push(OverlaySpan { mode, first: k, last: k }),
        }
    }
    let reference = present_runs(&reference.values)
        .into_iter()
        .map(|(a, b)| {
            let t = &primary.times;
            let mut poly = vec![[axes.x(t[a]), axes.baseline]];
            poly.extend((a..=b).map(|k| [axes.x(t[k]), axes.y(reference.values[k].unwrap(), scale)]));
            poly.push([axes.x(t[b]), axes.baseline]);
            poly
        })
        .collect();
    let point = |k: usize| primary.values[k].map(|v| [axes.x(primary.times[k]), axes.y(v, scale)]);
    let lines = spans
        .iter()
        .filter(|s| s.mode == OverlayMode::Line)
        .map(|s| {
            let end = (s.last + 1).min(primary.values.len() - 1);
            (s.first..=end).map_while(point).collect::<Vec<_>>()
        })
        .collect();
    Ok(Overlay { modes, spans, reference, lines })
}
