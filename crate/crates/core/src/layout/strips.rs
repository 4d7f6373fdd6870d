use serde::{Deserialize, Serialize};

use super::{
    anchor_y, bin_color, discretize, frame, nice_range, time_cursor, Chart, ChartAxes, ChartLayout, Frame,
    Rgb, Series, Side, ViewConfig, ViewMode, AXIS_X,
};
use crate::dataset::SimulationDataset;
use crate::Result;

/// Run of samples `first..=last` falling into one bin. `bin` is `None` for
/// missing samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripCell {
    pub first: usize,
    pub last: usize,
    pub x0: f64,
    pub x1: f64,
    pub bin: Option<usize>,
    pub color: Option<Rgb>,
}

/// Color-only encoding of one structure's series from one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub dataset: String,
    pub y0: f64,
    pub y1: f64,
    pub cells: Vec<StripCell>,
}

fn strip_cells(series: Option<&Series>, axes: &ChartAxes, range: (f64, f64), bins: usize) -> Vec<StripCell> {
    let Some(series) = series.filter(|s| !s.times.is_empty()) else {
        let (a, b) = (axes.x(axes.t0), axes.x(axes.t1));
        return vec![StripCell { first: 0, last: 0, x0: a.min(b), x1: a.max(b), bin: None, color: None }];
    };
    let t = &series.times;
    let n = t.len();
    let edge = |k: usize| -> f64 {
        // boundary between sample k-1 and k
        if k == 0 {
            t[0]
        } else if k == n {
            t[n - 1]
        } else {
            0.5 * (t[k - 1] + t[k])
        }
    };
    let mut cells: Vec<StripCell> = Vec::new();
    for (k, v) in series.values.iter().enumerate() {
        let bin = v.map(|v| discretize(v, range, bins));
        match cells.last_mut() {
            Some(c) if c.bin == bin => c.last = k,
            _ => cells.push(StripCell { first: k, last: k, x0: 0.0, x1: 0.0, bin, color: bin.map(|b| bin_color(b, bins)) }),
        }
    }
    for c in &mut cells {
        let (a, b) = (axes.x(edge(c.first)), axes.x(edge(c.last + 1)));
        c.x0 = a.min(b);
        c.x1 = a.max(b);
    }
    cells
}

/// Simplified ensemble view: for every structure one strip per dataset,
/// stacked inside the structure's chart frame in input order, colored by the
/// discretized colormap only. The automatic range is a 1-2-5 multiple of
/// the bin count covering the ensemble maximum.
pub fn simplified_strips(datasets: &[&SimulationDataset], config: &ViewConfig) -> Result<ChartLayout> {
    let mut config = config.normalized()?;
    config.mode = ViewMode::Simplified;
    if config.bins == 0 {
        config.bins = super::DEFAULT_SIMPLIFIED_BINS;
    }
    let bins = config.bins;
    let primary = datasets[0];
    let Frame {
        vertebrae,
        structures,
        range,
        scale,
    } = frame(datasets, &config, |max| nice_range(max, bins))?;

    let mut charts = Vec::with_capacity(structures.len());
    for s in &structures {
        let side = Side::of(s.kind);
        let anchor = [AXIS_X, anchor_y(&vertebrae, s)?];
        let times = primary.matrix(config.attribute)?.times();
        let axes = ChartAxes {
            side,
            t0: times.first().copied().unwrap_or(0.0),
            t1: times.last().copied().unwrap_or(0.0),
            baseline: anchor[1] + 0.5 * scale.height,
        };
        let frame = axes.frame(&scale);
        let row = scale.height / datasets.len() as f64;
        let series: Vec<Option<Series>> = datasets
            .iter()
            .map(|d| d.matrices.get(&config.attribute).and_then(|m| Series::of(m, &s.id)))
            .collect();
        let strips = datasets
            .iter()
            .zip(&series)
            .enumerate()
            .map(|(j, (d, series))| Strip {
                dataset: d.id().to_string(),
                y0: frame[1] + j as f64 * row,
                y1: frame[1] + (j + 1) as f64 * row,
                cells: strip_cells(series.as_ref(), &axes, range, bins),
            })
            .collect();
        charts.push(Chart {
            structure: s.id.clone(),
            kind: s.kind,
            side,
            anchor,
            axes,
            frame,
            missing: series.iter().all(|s| s.as_ref().is_none_or(|s| s.values.iter().all(Option::is_none))),
            areas: Vec::new(),
            lines: Vec::new(),
            colors: Vec::new(),
            slices: Vec::new(),
            overlay: None,
            strips,
            gridlines: Vec::new(),
            plane: None,
        });
    }

    let mut layout = ChartLayout {
        mode: ViewMode::Simplified,
        attribute: config.attribute,
        group: config.group,
        spacing: config.spacing,
        datasets: datasets.iter().map(|d| d.id().to_string()).collect(),
        range,
        bins,
        scale,
        vertebrae,
        charts,
        cursor: None,
    };
    if !layout.charts.is_empty() {
        layout.cursor = Some(time_cursor(&layout, primary, config.t)?);
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, ValueMatrix};
    use crate::layout::{bin_edges, layout_charts, tests::static_dataset, viridis};

    #[test]
    fn one_strip_per_dataset_and_structure() {
        let ds = static_dataset();
        let mut copies: Vec<SimulationDataset> = (0..5).map(|_| ds.clone()).collect();
        for (i, c) in copies.iter_mut().enumerate() {
            c.manifest.id = format!("d{}", i + 1);
        }
        let refs: Vec<&SimulationDataset> = copies.iter().collect();
        let config = ViewConfig { attribute: Attribute::Deformation, ..Default::default() };
        let l = simplified_strips(&refs, &config).unwrap();
        assert_eq!(l.bins, 4);
        assert_eq!(l.charts.len(), 8);
        for c in &l.charts {
            assert_eq!(c.strips.len(), 5);
            assert!(c.areas.is_empty() && c.slices.is_empty());
            for w in c.strips.windows(2) {
                assert_eq!(w[0].y1, w[1].y0);
            }
        }
        assert!(l.cursor.unwrap().marks.iter().all(|m| m.label.is_none()));
    }

    #[test]
    fn colors_match_discretized_samples() {
        let ds = static_dataset();
        let config = ViewConfig { mode: ViewMode::Simplified, attribute: Attribute::Deformation, ..Default::default() };
        let l = layout_charts(ds, &[], &config).unwrap();
        let m = ds.matrix(Attribute::Deformation).unwrap();
        assert!(bin_edges(l.range, l.bins).contains(&2.0));
        for c in &l.charts {
            let col = m.column(&c.structure).unwrap();
            for cell in &c.strips[0].cells {
                for k in cell.first..=cell.last {
                    let b = discretize(m.get(k, col).unwrap(), l.range, l.bins);
                    assert_eq!(cell.bin, Some(b));
                    assert_eq!(cell.color, Some(viridis((b as f64 + 0.5) / l.bins as f64)));
                }
            }
        }
    }

    #[test]
    fn constant_series_is_one_cell() {
        let times: Vec<f64> = (0..30).map(|k| k as f64 * 0.01).collect();
        let m = ValueMatrix::from_rows(Attribute::ForceMagnitude, times.clone(), vec!["x".into()], &vec![vec![Some(3.0)]; 30]).unwrap();
        let series = Series::of(&m, "x").unwrap();
        let axes = ChartAxes { side: Side::Left, t0: 0.0, t1: 0.29, baseline: 0.0 };
        let cells = strip_cells(Some(&series), &axes, (0.0, 4.0), 4);
        assert_eq!(cells.len(), 1);
        assert_eq!((cells[0].first, cells[0].last, cells[0].bin), (0, 29, Some(3)));
        assert!(cells[0].x1 < AXIS_X);
    }
}
