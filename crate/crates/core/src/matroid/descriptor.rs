//! JSON matroid descriptors.
//!
//! ```json
//! {"id": "u24", "kind": "uniform", "n": 4, "rank": 2,
//!  "weights": {"0,1": "3/1", "0,2": "2", ...}}
//! ```
//!
//! `kind` is one of `uniform` (`n`, `rank`), `partition` (`blocks`),
//! `graphic` (`edges` as vertex pairs) or `explicit` (`n`, `bases`).
//! `weights` is optional; when present it must list every basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::{self, Ratio};

use super::{build_from_bases, build_graphic, build_partition, build_uniform, Matroid, WeightedComplex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatroidSpec {
    Uniform {
        n: usize,
        #[serde(alias = "r")]
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
    },
    Graphic {
        edges: Vec<(usize, usize)>,
    },
    Explicit {
        n: usize,
        bases: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatroidDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub spec: MatroidSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, String>>,
}

impl MatroidDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serialises")
    }

    pub fn matroid(&self) -> Result<Matroid> {
        match &self.spec {
            MatroidSpec::Uniform { n, rank } => build_uniform(*n, *rank),
            MatroidSpec::Partition { blocks } => build_partition(blocks),
            MatroidSpec::Graphic { edges } => build_graphic(edges),
            MatroidSpec::Explicit { n, bases } => {
                let masks: Vec<SubsetMask> =
                    bases.iter().map(|b| SubsetMask::from_elements(b.iter().copied())).collect();
                if bases.iter().flatten().any(|&e| e >= *n) {
                    return Err(Error::InvalidParameters("basis element outside ground set".into()));
                }
                build_from_bases(*n, &masks)
            }
        }
    }

    pub fn id_or(&self, fallback: &str) -> String {
        self.id.clone().unwrap_or_else(|| fallback.to_string())
    }

    /// Builds the weighted complex; all-ones weights when none are given.
    pub fn complex(&self) -> Result<WeightedComplex> {
        let m = self.matroid()?;
        match &self.weights {
            None => WeightedComplex::uniform(m),
            Some(map) => {
                let n = m.ground_size();
                let mut weights = BTreeMap::new();
                for (key, value) in map {
                    let set = SubsetMask::parse_key(key, n)?;
                    let w: Ratio = rational::parse(value)?;
                    if weights.insert(set, w).is_some() {
                        return Err(Error::Parse(format!("duplicate weight key {key:?}")));
                    }
                }
                WeightedComplex::build(m, &weights)
            }
        }
    }
}
