use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const VIRIDIS_CSV: &str = include_str!("../../data/viridis.csv");

/// Linear RGB triple in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rgb(pub [f64; 3]);

impl Rgb {
    /// `#rrggbb`
    pub fn to_hex(self) -> String {
        let c = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        format!("#{:02x}{:02x}{:02x}", c(self.0[0]), c(self.0[1]), c(self.0[2]))
    }
}

/// The bundled 256-entry viridis reference table.
pub fn viridis_table() -> &'static [[f64; 3]] {
    static TABLE: OnceLock<Vec<[f64; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        VIRIDIS_CSV
            .lines()
            .skip(1)
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let mut it = l.split(',').map(|c| c.trim().parse::<f64>().expect("viridis table"));
                [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
            })
            .collect()
    })
}

/// Piecewise-linear lookup in the viridis table. `u` is clamped to `[0, 1]`.
pub fn viridis(u: f64) -> Rgb {
    let table = viridis_table();
    let u = if u.is_nan() { 0.0 } else { u.clamp(0.0, 1.0) };
    let x = u * (table.len() - 1) as f64;
    let i = (x.floor() as usize).min(table.len() - 2);
    let f = x - i as f64;
    let (a, b) = (table[i], table[i + 1]);
    Rgb([0, 1, 2].map(|c| a[c] + (b[c] - a[c]) * f))
}

/// Uniform bin index of `value` over `[lo, hi]`. Values at or above `hi` map
/// to the last bin, values at or below `lo` to the first.
pub fn discretize(value: f64, (lo, hi): (f64, f64), bins: usize) -> usize {
    let bins = bins.max(1);
    if !(value > lo) || !(hi > lo) {
        return 0;
    }
    if value >= hi {
        return bins - 1;
    }
    (((value - lo) / (hi - lo) * bins as f64).floor() as usize).min(bins - 1)
}

/// Lower edges of every bin plus `hi`.
pub fn bin_edges((lo, hi): (f64, f64), bins: usize) -> Vec<f64> {
    (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect()
}

/// Color of one bin: viridis at the bin centre.
pub fn bin_color(bin: usize, bins: usize) -> Rgb {
    viridis((bin as f64 + 0.5) / bins as f64)
}

/// Color of `value` under a range and bin count. `bins == 0` is continuous.
/// Every view colors values through this function.
pub fn value_color(value: f64, range: (f64, f64), bins: usize) -> Rgb {
    if bins == 0 {
        let (lo, hi) = range;
        viridis(if hi > lo { (value - lo) / (hi - lo) } else { 0.0 })
    } else {
        bin_color(discretize(value, range, bins), bins)
    }
}

/// Smallest `[0, bins·step]` covering `max` with `step` from the 1-2-5
/// series.
pub fn nice_range(max: f64, bins: usize) -> (f64, f64) {
    let bins = bins.max(1) as f64;
    if !(max > 0.0) || !max.is_finite() {
        return (0.0, bins);
    }
    let raw = max / bins;
    let mut exp = 10f64.powf(raw.log10().floor());
    loop {
        for m in [1.0, 2.0, 5.0] {
            let step = m * exp;
            if step * bins >= max {
                return (0.0, step * bins);
            }
        }
        exp *= 10.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_clamp() {
        assert_eq!(viridis(0.0), Rgb([0.267004, 0.004874, 0.329415]));
        assert_eq!(viridis(1.0), Rgb([0.993248, 0.906157, 0.143936]));
        assert_eq!(viridis(-0.5), viridis(0.0));
        assert_eq!(viridis(7.0), viridis(1.0));
        assert_eq!(viridis(1.0).to_hex(), "#fde725");
    }

    #[test]
    fn table_entries_are_hit_exactly() {
        let t = viridis_table();
        assert_eq!(t.len(), 256);
        for (i, row) in t.iter().enumerate() {
            assert_eq!(viridis(i as f64 / 255.0).0.map(|c| (c * 1e6).round()), row.map(|c| (c * 1e6).round()));
        }
    }

    #[test]
    fn discretize_examples() {
        assert_eq!(discretize(1.9, (0.0, 4.0), 4), 1);
        assert_eq!(discretize(2.0, (0.0, 4.0), 4), 2);
        assert_eq!(discretize(0.0, (0.0, 4.0), 4), 0);
        assert_eq!(discretize(4.0, (0.0, 4.0), 4), 3);
        assert_eq!(discretize(9.0, (0.0, 4.0), 4), 3);
        assert_eq!(discretize(-1.0, (0.0, 4.0), 4), 0);
        assert_eq!(bin_edges((0.0, 4.0), 4), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn nice_ranges() {
        assert_eq!(nice_range(3.46, 4), (0.0, 4.0));
        assert_eq!(nice_range(4.8, 4), (0.0, 8.0));
        assert_eq!(nice_range(1.3, 4), (0.0, 2.0));
        assert_eq!(nice_range(44.1, 4), (0.0, 80.0));
        assert_eq!(nice_range(0.0, 4), (0.0, 4.0));
    }

    #[test]
    fn discrete_colors_agree_with_bins() {
        for v in [0.1, 1.9, 2.0, 3.99] {
            assert_eq!(value_color(v, (0.0, 4.0), 4), bin_color(discretize(v, (0.0, 4.0), 4), 4));
        }
    }
}
