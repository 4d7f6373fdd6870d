use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Attribute, SimulationDataset, StructureKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueKind {
    MissingColumn,
    AllMissingValues,
    TimebaseMismatch,
    NegativeMagnitude,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IssueKind::MissingColumn => "MISSING_COLUMN",
            IssueKind::AllMissingValues => "ALL_MISSING_VALUES",
            IssueKind::TimebaseMismatch => "TIMEBASE_MISMATCH",
            IssueKind::NegativeMagnitude => "NEGATIVE_MAGNITUDE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub kind: IssueKind,
    /// Affected structure; `None` for matrix-wide issues such as a time base
    /// mismatch.
    pub structure: Option<String>,
    pub attribute: Option<Attribute>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn count(&self, kind: IssueKind) -> usize {
        self.issues.iter().filter(|i| i.kind == kind).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.issues {
            write!(f, "{}", i.kind)?;
            if let Some(s) = &i.structure {
                write!(f, " {s}")?;
            }
            if let Some(a) = i.attribute {
                write!(f, " [{a}]")?;
            }
            writeln!(f, ": {}", i.detail)?;
        }
        Ok(())
    }
}

/// Kinds of structure expected to have a column in a matrix of `attribute`.
/// Facet forces are recorded as magnitudes only; facet vectors are accepted
/// but not required.
pub fn expected_kinds(attribute: Attribute) -> &'static [StructureKind] {
    match attribute {
        Attribute::ForceMagnitude => &[
            StructureKind::Disc,
            StructureKind::FacetLeft,
            StructureKind::FacetRight,
        ],
        Attribute::ForceVector | Attribute::Deformation => &[StructureKind::Disc],
    }
}

const TIME_TOLERANCE: f64 = 1e-9;

fn same_timebase(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TIME_TOLERANCE)
}

/// Reports data problems per structure. The report is empty exactly when the
/// dataset is clean.
pub fn validate_dataset(dataset: &SimulationDataset) -> ValidationReport {
    let mut issues = Vec::new();
    let reference: Option<&[f64]> = dataset
        .kinematics
        .as_ref()
        .map(|k| k.times())
        .or_else(|| dataset.matrices.values().next().map(|m| m.times()));

    for (&attribute, m) in &dataset.matrices {
        if let Some(r) = reference {
            if !same_timebase(r, m.times()) {
                issues.push(Issue {
                    kind: IssueKind::TimebaseMismatch,
                    structure: None,
                    attribute: Some(attribute),
                    detail: format!("{} rows do not match the reference time base ({} ticks)", m.rows(), r.len()),
                });
            }
        }
        let dt = dataset.manifest.dt;
        if let Some(w) = m.times().windows(2).find(|w| ((w[1] - w[0]) - dt).abs() > TIME_TOLERANCE.max(dt * 1e-6)) {
            issues.push(Issue {
                kind: IssueKind::TimebaseMismatch,
                structure: None,
                attribute: Some(attribute),
                detail: format!("tick {} -> {} does not match dt = {dt}", w[0], w[1]),
            });
        }

        for s in dataset.registry.iter() {
            if !expected_kinds(attribute).contains(&s.kind) {
                continue;
            }
            match m.column(&s.id) {
                None => issues.push(Issue {
                    kind: IssueKind::MissingColumn,
                    structure: Some(s.id.clone()),
                    attribute: Some(attribute),
                    detail: "no column in matrix".into(),
                }),
                Some(c) if m.is_column_missing(c) => issues.push(Issue {
                    kind: IssueKind::AllMissingValues,
                    structure: Some(s.id.clone()),
                    attribute: Some(attribute),
                    detail: format!("all {} values missing", m.rows()),
                }),
                Some(_) => {}
            }
        }

        if attribute.is_magnitude() {
            for (c, id) in m.columns().iter().enumerate() {
                let neg = (0..m.rows()).find_map(|r| m.get(r, c).filter(|v| *v < 0.0).map(|v| (r, v)));
                if let Some((r, v)) = neg {
                    issues.push(Issue {
                        kind: IssueKind::NegativeMagnitude,
                        structure: Some(id.clone()),
                        attribute: Some(attribute),
                        detail: format!("value {v} at t = {}", m.times()[r]),
                    });
                }
            }
        }
    }
    ValidationReport { issues }
}
