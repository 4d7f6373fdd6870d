use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Observed quantity stored in one value matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    /// Force magnitude in N.
    ForceMagnitude,
    /// Force vector in N, three components per structure.
    ForceVector,
    /// Deformation in mm.
    Deformation,
}

impl Attribute {
    pub const ALL: [Attribute; 3] = [
        Attribute::ForceMagnitude,
        Attribute::ForceVector,
        Attribute::Deformation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::ForceMagnitude => "force_magnitude",
            Attribute::ForceVector => "force_vector",
            Attribute::Deformation => "deformation",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Attribute::ForceMagnitude | Attribute::ForceVector => "N",
            Attribute::Deformation => "mm",
        }
    }

    pub fn components(self) -> usize {
        match self {
            Attribute::ForceVector => 3,
            _ => 1,
        }
    }

    /// Whether stored values must be non-negative.
    pub fn is_magnitude(self) -> bool {
        !matches!(self, Attribute::ForceVector)
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Query(format!("unknown attribute `{s}`")))
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Per-tick values for a set of structures. Rows are ticks, columns are
/// structures; missing cells are kept as `None` on lookup.
#[derive(Clone, Debug)]
pub struct ValueMatrix {
    attribute: Attribute,
    times: Vec<f64>,
    columns: Vec<String>,
    index: HashMap<String, usize>,
    // row-major, `components` values per cell, NaN marks a missing cell
    values: Vec<f64>,
}

impl PartialEq for ValueMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.attribute == other.attribute
            && self.columns == other.columns
            && bits(&self.times) == bits(&other.times)
            && bits(&self.values) == bits(&other.values)
    }
}

fn bits(xs: &[f64]) -> Vec<u64> {
    xs.iter()
        .map(|x| if x.is_nan() { u64::MAX } else { x.to_bits() })
        .collect()
}

impl ValueMatrix {
    /// Builds a scalar matrix. `rows[k][c]` is the value of column `c` at
    /// `times[k]`.
    pub fn from_rows(
        attribute: Attribute,
        times: Vec<f64>,
        columns: Vec<String>,
        rows: &[Vec<Option<f64>>],
    ) -> Result<Self> {
        if attribute.components() != 1 {
            return Err(Error::Parameter(format!("{attribute} is not scalar")));
        }
        let values = rows
            .iter()
            .flat_map(|r| r.iter().map(|v| v.unwrap_or(f64::NAN)))
            .collect();
        Self::from_raw(attribute, times, columns, values)
    }

    /// Builds a vector matrix from per-cell 3-vectors.
    pub fn from_vector_rows(
        times: Vec<f64>,
        columns: Vec<String>,
        rows: &[Vec<Option<Vec3>>],
    ) -> Result<Self> {
        let values = rows
            .iter()
            .flat_map(|r| {
                r.iter().flat_map(|v| match v {
                    Some(v) => [v.x, v.y, v.z],
                    None => [f64::NAN; 3],
                })
            })
            .collect();
        Self::from_raw(Attribute::ForceVector, times, columns, values)
    }

    fn from_raw(
        attribute: Attribute,
        times: Vec<f64>,
        columns: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let width = columns.len() * attribute.components();
        if values.len() != times.len() * width {
            return Err(Error::format(None, "row count does not match the time base"));
        }
        check_times(&times, |_| None)?;
        let mut index = HashMap::with_capacity(columns.len());
        for (i, c) in columns.iter().enumerate() {
            if index.insert(c.clone(), i).is_some() {
                return Err(Error::format(None, format!("duplicate column `{c}`")));
            }
        }
        Ok(ValueMatrix {
            attribute,
            times,
            columns,
            index,
            values,
        })
    }

    pub fn attribute(&self) -> Attribute {
        self.attribute
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> usize {
        self.times.len()
    }

    pub fn column(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn cell(&self, row: usize, col: usize) -> &[f64] {
        let k = self.attribute.components();
        let start = (row * self.columns.len() + col) * k;
        &self.values[start..start + k]
    }

    /// Scalar value of a cell; vector cells report their norm.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let c = self.cell(row, col);
        if c.iter().any(|v| v.is_nan()) {
            return None;
        }
        match c {
            [v] => Some(*v),
            [x, y, z] => Some((x * x + y * y + z * z).sqrt()),
            _ => unreachable!(),
        }
    }

    pub fn get_vector(&self, row: usize, col: usize) -> Option<Vec3> {
        match self.cell(row, col) {
            [x, y, z] if !(x.is_nan() || y.is_nan() || z.is_nan()) => Some(Vec3::new(*x, *y, *z)),
            _ => None,
        }
    }

    /// Scalar series of one column.
    pub fn series(&self, col: usize) -> Vec<Option<f64>> {
        (0..self.rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn series_by_id(&self, id: &str) -> Option<Vec<Option<f64>>> {
        self.column(id).map(|c| self.series(c))
    }

    pub fn is_column_missing(&self, col: usize) -> bool {
        (0..self.rows()).all(|r| self.get(r, col).is_none())
    }

    /// Largest present scalar value, if any.
    pub fn max_value(&self) -> Option<f64> {
        (0..self.columns.len())
            .flat_map(|c| self.series(c))
            .flatten()
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    }

    /// Blanks an entire column, e.g. to build a missing-data fixture.
    pub fn clear_column(&mut self, col: usize) {
        let k = self.attribute.components();
        let w = self.columns.len() * k;
        for r in 0..self.rows() {
            let s = r * w + col * k;
            self.values[s..s + k].fill(f64::NAN);
        }
    }

    /// Drops a column entirely.
    pub fn remove_column(&mut self, id: &str) -> bool {
        let Some(col) = self.column(id) else {
            return false;
        };
        let k = self.attribute.components();
        let w = self.columns.len() * k;
        let mut values = Vec::with_capacity(self.values.len() - self.rows() * k);
        for r in 0..self.rows() {
            let row = &self.values[r * w..(r + 1) * w];
            values.extend_from_slice(&row[..col * k]);
            values.extend_from_slice(&row[(col + 1) * k..]);
        }
        self.values = values;
        self.columns.remove(col);
        self.index = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        true
    }

    /// Sets one scalar cell.
    pub fn set(&mut self, row: usize, col: usize, value: Option<f64>) {
        assert_eq!(self.attribute.components(), 1);
        let i = row * self.columns.len() + col;
        self.values[i] = value.unwrap_or(f64::NAN);
    }

    /// Serialises to the CSV format read by [`parse_matrix_csv`]. Values are
    /// written in shortest round-trip form so re-parsing is bit-exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for c in &self.columns {
            if self.attribute.components() == 1 {
                write!(out, ",{c}").unwrap();
            } else {
                for a in AXES {
                    write!(out, ",{c}.{a}").unwrap();
                }
            }
        }
        out.push('\n');
        let w = self.columns.len() * self.attribute.components();
        for (r, t) in self.times.iter().enumerate() {
            write!(out, "{t:?}").unwrap();
            for v in &self.values[r * w..(r + 1) * w] {
                if v.is_nan() {
                    out.push(',');
                } else {
                    write!(out, ",{v:?}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

fn check_times(times: &[f64], line_of: impl Fn(usize) -> Option<usize>) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::format(
                line_of(i + 1),
                format!("non-monotonic time: {} follows {}", w[1], w[0]),
            ));
        }
    }
    if let Some(i) = times.iter().position(|t| !t.is_finite()) {
        return Err(Error::format(line_of(i), "non-finite time"));
    }
    Ok(())
}

/// Splits an optional `[unit]` suffix off a header cell.
fn strip_unit(cell: &str, attribute: Attribute) -> &str {
    match cell.split_once('[') {
        Some((name, rest)) => {
            let unit = rest.trim_end_matches(']').trim();
            if unit != attribute.unit() {
                log::warn!(
                    "ignoring unit hint `{unit}` on column `{}` ({attribute} is stored in {})",
                    name.trim(),
                    attribute.unit()
                );
            }
            name.trim()
        }
        None => cell,
    }
}

fn parse_cell(cell: &str, line: usize) -> Result<f64> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::format(line, format!("invalid number `{cell}`")))
}

/// Parses a value matrix from CSV text.
///
/// The header is `time,<id>,<id>,...`; vector attributes use three columns
/// per structure named `<id>.x`, `<id>.y`, `<id>.z`. A header cell may carry
/// a unit hint such as `C2C3[N]`, which is ignored. Empty cells and `nan`
/// denote missing values.
pub fn parse_matrix_csv(text: &str, attribute: Attribute) -> Result<ValueMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(None, "empty matrix file"))?;
    let cells: Vec<&str> = header.split(',').map(str::trim).collect();
    if cells.first().copied() != Some("time") {
        return Err(Error::format(1, "header must start with `time`"));
    }
    let names: Vec<&str> = cells[1..].iter().map(|c| strip_unit(c, attribute)).collect();
    let k = attribute.components();
    let columns: Vec<String> = if k == 1 {
        names.iter().map(|s| s.to_string()).collect()
    } else {
        if names.len() % k != 0 {
            return Err(Error::format(1, "vector matrix needs three columns per structure"));
        }
        names
            .chunks(k)
            .map(|ch| {
                let base = ch[0].strip_suffix(".x").unwrap_or("");
                let ok = !base.is_empty()
                    && ch
                        .iter()
                        .zip(AXES)
                        .all(|(c, a)| c.strip_suffix(a).and_then(|s| s.strip_suffix('.')) == Some(base));
                if ok {
                    Ok(base.to_string())
                } else {
                    Err(Error::format(1, format!("expected `<id>.x,<id>.y,<id>.z`, got `{}`", ch.join(","))))
                }
            })
            .collect::<Result<_>>()?
    };
    if let Some(c) = columns.iter().find(|c| c.is_empty()) {
        return Err(Error::format(1, format!("empty column name `{c}`")));
    }

    let mut times = Vec::new();
    let mut lines_of_rows = Vec::new();
    let mut values = Vec::new();
    for (line, row) in lines {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != names.len() + 1 {
            return Err(Error::format(
                line,
                format!("ragged row: {} cells, header has {}", cells.len(), names.len() + 1),
            ));
        }
        let t = parse_cell(cells[0], line)?;
        if t.is_nan() {
            return Err(Error::format(line, "missing time"));
        }
        times.push(t);
        lines_of_rows.push(line);
        for c in &cells[1..] {
            values.push(parse_cell(c, line)?);
        }
    }
    check_times(&times, |i| lines_of_rows.get(i).copied())?;
    ValueMatrix::from_raw(attribute, times, columns, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_matrix() {
        let m = parse_matrix_csv("time,C2C3\n0.0,10\n0.01,12", Attribute::ForceMagnitude).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.columns(), ["C2C3"]);
        assert_eq!(m.times(), [0.0, 0.01]);
        assert_eq!(m.get(0, 0), Some(10.0));
        assert_eq!(m.get(1, 0), Some(12.0));
    }

    #[test]
    fn all_missing_column_survives() {
        let text = "time,C5C6_facetR,C5C6_facetL\n0.0,1.5,\n0.01,2.0,nan\n0.02,2.5,NaN\n";
        let m = parse_matrix_csv(text, Attribute::ForceMagnitude).unwrap();
        let c = m.column("C5C6_facetL").unwrap();
        assert!(m.is_column_missing(c));
        assert_eq!(m.series(c), vec![None, None, None]);
        assert!(!m.is_column_missing(m.column("C5C6_facetR").unwrap()));
    }

    #[test]
    fn non_monotonic_time_is_rejected() {
        let err = parse_matrix_csv("time,A\n0.02,1\n0.01,2", Attribute::Deformation).unwrap_err();
        assert!(matches!(err, Error::Format { line: Some(3), .. }), "{err}");
        assert!(err.to_string().contains("non-monotonic"));
        assert!(parse_matrix_csv("time,A\n0.0,1\n0.0,2", Attribute::Deformation).is_err());
    }

    #[test]
    fn ragged_row_is_rejected() {
        let err = parse_matrix_csv("time,A,B\n0.0,1,2\n0.1,3", Attribute::Deformation).unwrap_err();
        assert!(err.to_string().contains("ragged"));
    }

    #[test]
    fn unit_hints_are_ignored() {
        let m = parse_matrix_csv("time,A[N],B[kN]\n0,1,2\n", Attribute::ForceMagnitude).unwrap();
        assert_eq!(m.columns(), ["A", "B"]);
        assert_eq!(m.get(0, 1), Some(2.0));
    }

    #[test]
    fn vector_columns() {
        let text = "time,C2C3.x,C2C3.y,C2C3.z\n0,3,,4\n1,3,0,4\n";
        let m = parse_matrix_csv(text, Attribute::ForceVector).unwrap();
        assert_eq!(m.columns(), ["C2C3"]);
        assert_eq!(m.get(0, 0), None);
        assert_eq!(m.get(1, 0), Some(5.0));
        assert_eq!(m.get_vector(1, 0), Some(Vec3::new(3.0, 0.0, 4.0)));
        assert!(parse_matrix_csv("time,A.x,B.y,A.z\n0,1,2,3\n", Attribute::ForceVector).is_err());
    }

    #[test]
    fn garbage_cells_are_rejected() {
        assert!(parse_matrix_csv("time,A\n0,abc\n", Attribute::Deformation).is_err());
        assert!(parse_matrix_csv("t,A\n0,1\n", Attribute::Deformation).is_err());
        assert!(parse_matrix_csv("", Attribute::Deformation).is_err());
    }

    #[test]
    fn column_removal_keeps_other_cells() {
        let mut m = parse_matrix_csv("time,A,B,C\n0,1,2,3\n1,4,5,6\n", Attribute::Deformation).unwrap();
        assert!(m.remove_column("B"));
        assert_eq!(m.columns(), ["A", "C"]);
        assert_eq!(m.series_by_id("C").unwrap(), vec![Some(3.0), Some(6.0)]);
        assert!(!m.remove_column("B"));
    }
}
