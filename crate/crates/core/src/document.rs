//! JSON documents describing amalgams, and batch manifests.
//!
//! Elements are referred to by name at the interface; a table entry may also
//! be a plain index into `elements`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::fis::{Elem, FiniteInverseSemigroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupDocument {
    pub name: String,
    pub elements: Vec<String>,
    /// Row-major: `mul[a][b]` is `a·b`.
    pub mul: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmalgamDocument {
    pub s1: SemigroupDocument,
    pub s2: SemigroupDocument,
    pub u: SemigroupDocument,
    /// `U` element name to `S1` element name.
    pub phi1: BTreeMap<String, String>,
    pub phi2: BTreeMap<String, String>,
}

fn lookup(names: &[String], name: &str, context: &str) -> Result<Elem> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Document(format!("{context}: unknown element `{name}`")))
}

impl SemigroupDocument {
    pub fn to_semigroup(&self) -> Result<FiniteInverseSemigroup> {
        let n = self.elements.len();
        for (i, name) in self.elements.iter().enumerate() {
            if self.elements[..i].contains(name) {
                return Err(Error::Document(format!("{}: duplicate element name `{name}`", self.name)));
            }
        }
        let mut mul = Vec::with_capacity(self.mul.len());
        for (r, row) in self.mul.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (c, entry) in row.iter().enumerate() {
                out.push(match entry {
                    Entry::Index(k) if *k < n => *k,
                    Entry::Index(k) => return Err(Error::EntryOutOfRange { row: r, col: c, value: *k }),
                    Entry::Name(s) => lookup(&self.elements, s, &self.name)?,
                });
            }
            mul.push(out);
        }
        if mul.len() != n {
            return Err(Error::Document(format!("{}: {} rows for {n} elements", self.name, mul.len())));
        }
        let generators = match &self.generators {
            Some(g) => Some(g.iter().map(|s| lookup(&self.elements, s, &self.name)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        FiniteInverseSemigroup::from_table(self.name.clone(), self.elements.clone(), mul, generators)
    }

    pub fn from_semigroup(s: &FiniteInverseSemigroup) -> Self {
        let names = s.names();
        let all: Vec<Elem> = s.elements().collect();
        SemigroupDocument {
            name: s.name().to_string(),
            elements: names.to_vec(),
            mul: s.table().iter().map(|row| row.iter().map(|&x| Entry::Name(names[x].clone())).collect()).collect(),
            generators: (s.generators() != all.as_slice())
                .then(|| s.generators().iter().map(|&g| names[g].clone()).collect()),
        }
    }
}

impl AmalgamDocument {
    /// Parses JSON text; syntax errors carry their line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Document(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn to_amalgam(&self) -> Result<Amalgam> {
        let s1 = self.s1.to_semigroup()?;
        let s2 = self.s2.to_semigroup()?;
        let u = self.u.to_semigroup()?;
        let map = |phi: &BTreeMap<String, String>, target: &SemigroupDocument, label: &str| -> Result<Vec<Elem>> {
            for key in phi.keys() {
                lookup(&self.u.elements, key, label)?;
            }
            self.u
                .elements
                .iter()
                .map(|name| {
                    let image = phi
                        .get(name)
                        .ok_or_else(|| Error::Document(format!("{label}: no image for `{name}`")))?;
                    lookup(&target.elements, image, label)
                })
                .collect()
        };
        let phi1 = map(&self.phi1, &self.s1, "phi1")?;
        let phi2 = map(&self.phi2, &self.s2, "phi2")?;
        Amalgam::new(s1, s2, u, phi1, phi2)
    }

    pub fn from_amalgam(a: &Amalgam) -> Self {
        let phi = |color: u8| -> BTreeMap<String, String> {
            a.u()
                .elements()
                .map(|u| (a.u().element_name(u).to_string(), a.factor(color).element_name(a.phi(color, u)).to_string()))
                .collect()
        };
        AmalgamDocument {
            s1: SemigroupDocument::from_semigroup(a.factor(1)),
            s2: SemigroupDocument::from_semigroup(a.factor(2)),
            u: SemigroupDocument::from_semigroup(a.u()),
            phi1: phi(1),
            phi2: phi(2),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

/// A list of queries against amalgam documents.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub queries: Vec<ManifestQuery>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestQuery {
    /// A path relative to the manifest, or `corpus:<name>` for a built-in amalgam.
    pub document: String,
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    /// Compared with the query summary when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<serde_json::Value>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Document(format!("line {}, column {}: {e}", e.line(), e.column())))
    }
}
