use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Vertebra,
    Disc,
    FacetLeft,
    FacetRight,
}

impl StructureKind {
    pub fn is_facet(self) -> bool {
        matches!(self, StructureKind::FacetLeft | StructureKind::FacetRight)
    }
}

/// Identity of one anatomical structure. Discs and facets name the vertebra
/// pair they connect; vertebrae leave both fields empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureRef {
    pub id: String,
    pub kind: StructureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cranial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caudal: Option<String>,
}

impl StructureRef {
    pub fn vertebra(id: impl Into<String>) -> Self {
        StructureRef {
            id: id.into(),
            kind: StructureKind::Vertebra,
            cranial: None,
            caudal: None,
        }
    }

    pub fn joint(
        id: impl Into<String>,
        kind: StructureKind,
        cranial: impl Into<String>,
        caudal: impl Into<String>,
    ) -> Self {
        StructureRef {
            id: id.into(),
            kind,
            cranial: Some(cranial.into()),
            caudal: Some(caudal.into()),
        }
    }
}

/// Standard vertebra names in cranial to caudal order.
pub fn vertebra_sequence() -> Vec<String> {
    let mut names = Vec::with_capacity(25);
    names.extend((1..=7).map(|i| format!("C{i}")));
    names.extend((1..=12).map(|i| format!("Th{i}")));
    names.extend((1..=5).map(|i| format!("L{i}")));
    names.push("S1".to_string());
    names
}

/// Expands a span such as `C1..Th3` into vertebra ids.
pub fn expand_span(span: &str) -> Result<Vec<String>> {
    let (first, last) = span
        .split_once("..")
        .map(|(a, b)| (a.trim(), b.trim()))
        .unwrap_or((span.trim(), span.trim()));
    let seq = vertebra_sequence();
    let pos = |name: &str| {
        seq.iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::format(None, format!("unknown vertebra `{name}` in span `{span}`")))
    };
    let (a, b) = (pos(first)?, pos(last)?);
    if a > b {
        return Err(Error::format(None, format!("span `{span}` runs caudal to cranial")));
    }
    Ok(seq[a..=b].to_vec())
}

/// All structures of a dataset with O(1) lookup by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Registry {
    structures: Vec<StructureRef>,
    index: HashMap<String, usize>,
    vertebra_order: HashMap<String, usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub vertebrae: usize,
    pub discs: usize,
    pub facet_pairs: usize,
}

impl Registry {
    /// Builds a registry from ordered vertebra ids plus joint structures.
    /// Discs and facets must connect two distinct, registered, adjacent
    /// vertebrae (cranial first).
    pub fn new(vertebrae: &[String], joints: &[StructureRef]) -> Result<Self> {
        let mut reg = Registry::default();
        for (i, v) in vertebrae.iter().enumerate() {
            reg.vertebra_order.insert(v.clone(), i);
            reg.push(StructureRef::vertebra(v.clone()))?;
        }
        for s in joints {
            if s.kind == StructureKind::Vertebra {
                if !reg.vertebra_order.contains_key(&s.id) {
                    return Err(Error::format(
                        None,
                        format!("vertebra `{}` lies outside the model span", s.id),
                    ));
                }
                continue;
            }
            let (Some(cr), Some(ca)) = (&s.cranial, &s.caudal) else {
                return Err(Error::format(None, format!("`{}` lacks its vertebra pair", s.id)));
            };
            let (Some(&i), Some(&j)) = (reg.vertebra_order.get(cr), reg.vertebra_order.get(ca))
            else {
                return Err(Error::format(
                    None,
                    format!("`{}` references unregistered vertebrae {cr}/{ca}", s.id),
                ));
            };
            if i + 1 != j {
                return Err(Error::format(
                    None,
                    format!("`{}` connects non-adjacent vertebrae {cr}/{ca}", s.id),
                ));
            }
            reg.push(s.clone())?;
        }
        Ok(reg)
    }

    fn push(&mut self, s: StructureRef) -> Result<()> {
        if self.index.contains_key(&s.id) {
            return Err(Error::format(None, format!("duplicate structure id `{}`", s.id)));
        }
        self.index.insert(s.id.clone(), self.structures.len());
        self.structures.push(s);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&StructureRef> {
        self.index.get(id).map(|&i| &self.structures[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &StructureRef> {
        self.structures.iter()
    }

    pub fn of_kind(&self, kind: StructureKind) -> impl Iterator<Item = &StructureRef> {
        self.structures.iter().filter(move |s| s.kind == kind)
    }

    /// Vertebrae in cranial to caudal order.
    pub fn vertebrae(&self) -> impl Iterator<Item = &StructureRef> {
        self.of_kind(StructureKind::Vertebra)
    }

    /// Position of a vertebra counted from the top (0 = topmost).
    pub fn vertebra_index(&self, id: &str) -> Option<usize> {
        self.vertebra_order.get(id).copied()
    }

    /// Non-vertebra structures, in registration order.
    pub fn joints(&self) -> Vec<StructureRef> {
        self.structures
            .iter()
            .filter(|s| s.kind != StructureKind::Vertebra)
            .cloned()
            .collect()
    }

    pub fn census(&self) -> Census {
        let facet_pairs: BTreeSet<(&str, &str)> = self
            .structures
            .iter()
            .filter(|s| s.kind.is_facet())
            .filter_map(|s| Some((s.cranial.as_deref()?, s.caudal.as_deref()?)))
            .collect();
        Census {
            vertebrae: self.of_kind(StructureKind::Vertebra).count(),
            discs: self.of_kind(StructureKind::Disc).count(),
            facet_pairs: facet_pairs.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lumbar() -> Registry {
        let v = expand_span("L1..L5").unwrap();
        let mut joints = Vec::new();
        for w in v.windows(2) {
            let pair = format!("{}{}", w[0], w[1]);
            joints.push(StructureRef::joint(&pair, StructureKind::Disc, &w[0], &w[1]));
            joints.push(StructureRef::joint(
                format!("{pair}_facetL"),
                StructureKind::FacetLeft,
                &w[0],
                &w[1],
            ));
            joints.push(StructureRef::joint(
                format!("{pair}_facetR"),
                StructureKind::FacetRight,
                &w[0],
                &w[1],
            ));
        }
        Registry::new(&v, &joints).unwrap()
    }

    #[test]
    fn span_expansion() {
        let v = expand_span("C1..Th3").unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], "C1");
        assert_eq!(v[9], "Th3");
        assert_eq!(expand_span("C4").unwrap(), vec!["C4"]);
        assert!(expand_span("Th3..C1").is_err());
        assert!(expand_span("X1..C2").is_err());
    }

    #[test]
    fn lumbar_census() {
        let c = lumbar().census();
        assert_eq!((c.vertebrae, c.discs, c.facet_pairs), (5, 4, 4));
    }

    #[test]
    fn single_vertebra_census() {
        let reg = Registry::new(&expand_span("C4..C4").unwrap(), &[]).unwrap();
        let c = reg.census();
        assert_eq!((c.vertebrae, c.discs, c.facet_pairs), (1, 0, 0));
    }

    #[test]
    fn rejects_bad_adjacency() {
        let v = expand_span("C1..C4").unwrap();
        let skip = StructureRef::joint("C2C4", StructureKind::Disc, "C2", "C4");
        assert!(Registry::new(&v, &[skip]).is_err());
        let same = StructureRef::joint("C2C2", StructureKind::Disc, "C2", "C2");
        assert!(Registry::new(&v, &[same]).is_err());
        let unknown = StructureRef::joint("C7Th1", StructureKind::Disc, "C7", "Th1");
        assert!(Registry::new(&v, &[unknown]).is_err());
        let d = StructureRef::joint("C2C3", StructureKind::Disc, "C2", "C3");
        assert!(Registry::new(&v, &[d.clone(), d]).is_err());
    }
}
