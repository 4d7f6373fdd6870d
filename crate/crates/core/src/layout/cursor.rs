use serde::{Deserialize, Serialize};

use super::{ChartLayout, Point, Side};
use crate::dataset::SimulationDataset;
use crate::Result;

/// Label shown for a missing cell.
pub const MISSING_LABEL: &str = "–";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub text: String,
    pub value: Option<f64>,
    pub position: Point,
    /// Text grows away from the spine: `start` on the right, `end` on the
    /// left.
    pub anchor: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CursorMark {
    pub structure: String,
    pub line: [Point; 2],
    pub label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cursor {
    pub requested: f64,
    pub tick: usize,
    pub t: f64,
    pub marks: Vec<CursorMark>,
}

/// Index of the tick nearest to `t`; a midpoint goes to the later tick and
/// `t` outside the time base is clamped.
pub fn snap_tick(times: &[f64], t: f64) -> usize {
    if times.is_empty() {
        return 0;
    }
    let k = times.partition_point(|&x| x < t);
    if k == 0 {
        return 0;
    }
    if k == times.len() {
        return k - 1;
    }
    let (before, after) = (t - times[k - 1], times[k] - t);
    let tie = 1e-9 * (times[k] - times[k - 1]);
    if after <= before + tie {
        k
    } else {
        k - 1
    }
}

/// Selection line across every chart at the tick nearest `t`, with each
/// chart's matrix value as a label. Labels are left out in the simplified
/// view.
pub fn time_cursor(layout: &ChartLayout, dataset: &SimulationDataset, t: f64) -> Result<Cursor> {
    let matrix = dataset.matrix(layout.attribute)?;
    let tick = snap_tick(matrix.times(), t);
    let snapped = matrix.times().get(tick).copied().unwrap_or(0.0);
    let marks = layout
        .charts
        .iter()
        .map(|c| {
            let x = c.axes.x(snapped);
            let label = layout.shows_labels().then(|| {
                let value = matrix.column(&c.structure).and_then(|col| matrix.get(tick, col));
                let (dx, anchor) = match c.side {
                    Side::Right => (1.5, "start"),
                    Side::Left => (-1.5, "end"),
                };
                Label {
                    text: value.map_or_else(|| MISSING_LABEL.to_string(), |v| format!("{v:.2}")),
                    value,
                    position: [x + dx, c.frame[1] - 1.0],
                    anchor: anchor.to_string(),
                }
            });
            CursorMark {
                structure: c.structure.clone(),
                line: [[x, c.frame[1]], [x, c.frame[3]]],
                label,
            }
        })
        .collect();
    Ok(Cursor {
        requested: t,
        tick,
        t: snapped,
        marks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Attribute;
    use crate::layout::tests::static_dataset;
    use crate::layout::{layout_charts, ViewConfig};

    #[test]
    fn snapping() {
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.01).collect();
        assert_eq!(snap_tick(&times, 0.03), 3);
        assert_eq!(snap_tick(&times, 0.034), 3);
        assert_eq!(snap_tick(&times, 0.036), 4);
        assert_eq!(snap_tick(&times, 0.005), 1);
        assert_eq!(snap_tick(&times, 0.015), 2);
        assert_eq!(snap_tick(&times, 0.095), 10);
        assert_eq!(snap_tick(&times, 999.0), 10);
        assert_eq!(snap_tick(&times, -1.0), 0);
    }

    #[test]
    fn labels_equal_matrix_row() {
        let ds = static_dataset();
        let l = layout_charts(ds, &[], &ViewConfig { t: 0.2, ..Default::default() }).unwrap();
        let c = l.cursor.as_ref().unwrap();
        assert_eq!(c.tick, 20);
        let m = ds.matrix(Attribute::ForceMagnitude).unwrap();
        for mark in &c.marks {
            let v = m.get(20, m.column(&mark.structure).unwrap());
            assert_eq!(mark.label.as_ref().unwrap().value, v);
        }
        let far = time_cursor(&l, ds, 1e9).unwrap();
        assert_eq!(far.tick, m.rows() - 1);
    }

    #[test]
    fn missing_cell_label() {
        let mut ds = static_dataset().clone();
        let m = ds.matrices.get_mut(&Attribute::ForceMagnitude).unwrap();
        let col = m.column("C3C4").unwrap();
        m.set(5, col, None);
        let l = layout_charts(&ds, &[], &ViewConfig { t: 0.05, ..Default::default() }).unwrap();
        let mark = l.cursor.unwrap().marks.into_iter().find(|m| m.structure == "C3C4").unwrap();
        assert_eq!(mark.label.unwrap().text, MISSING_LABEL);
    }
}
