//! The on-disk instance schema shared by the CLI and the fuzz corpus.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::generate::GeneratedInstance;
use crate::polyhedron::{HalfSpace, Polyhedron, PolyhedronJson};
use crate::sup::{CheckInstance, FamilyJson, FamilyOrder, LabeledFunction};

pub const INSTANCE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledSet {
    pub label: String,
    pub set: PolyhedronJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub dim: usize,
    pub functions: Vec<LabeledFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<FamilyOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<LabeledSet>>,
    #[serde(default, rename = "robust_B", skip_serializing_if = "Option::is_none")]
    pub robust_b: Option<PolyhedronJson>,
}

/// Row-only wire form, so writing never triggers vertex enumeration.
pub fn rows_json(p: &Polyhedron) -> PolyhedronJson {
    let row = |h: &HalfSpace| h.row().into_inner();
    PolyhedronJson { dim: p.dim(), ineqs: p.ineqs().iter().map(row).collect(), eqs: p.eqs().iter().map(row).collect(), vertices: None, rays: None }
}

impl InstanceFile {
    /// Parses and validates; unknown fields and version mismatches are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if f.version != INSTANCE_VERSION {
            return Err(Error::Parse(format!("unsupported instance version {}", f.version)));
        }
        if f.functions.is_empty() {
            return Err(Error::Parse("an instance needs at least one function".into()));
        }
        Ok(f)
    }

    pub fn build(&self) -> Result<CheckInstance> {
        let family = FamilyJson { dim: self.dim, functions: self.functions.clone(), order: self.order.clone() }.build()?;
        let set = |j: &PolyhedronJson| {
            check_dim(self.dim, j.dim)?;
            Polyhedron::from_json(j)
        };
        let sets = self
            .sets
            .iter()
            .flatten()
            .map(|s| Ok((s.label.clone(), set(&s.set)?)))
            .collect::<Result<Vec<_>>>()?;
        let robust_b = self.robust_b.as_ref().map(set).transpose()?;
        Ok(CheckInstance { family, sets, robust_b })
    }

    pub fn from_instance(inst: &CheckInstance) -> Self {
        let fj = inst.family.to_json();
        InstanceFile {
            version: INSTANCE_VERSION,
            dim: fj.dim,
            functions: fj.functions,
            order: fj.order,
            sets: (!inst.sets.is_empty())
                .then(|| inst.sets.iter().map(|(l, p)| LabeledSet { label: l.clone(), set: rows_json(p) }).collect()),
            robust_b: inst.robust_b.as_ref().map(rows_json),
        }
    }

    pub fn from_generated(g: &GeneratedInstance) -> Self {
        Self::from_instance(&CheckInstance { family: g.family.clone(), sets: g.sets.clone(), robust_b: g.robust_b.clone() })
    }
}

impl From<&GeneratedInstance> for CheckInstance {
    fn from(g: &GeneratedInstance) -> Self {
        CheckInstance { family: g.family.clone(), sets: g.sets.clone(), robust_b: g.robust_b.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PM: &str = r#"{
        "version": 1,
        "dim": 1,
        "functions": [
            {"label": "plus", "function": {"dim": 1, "pieces": [{"a": ["1"], "b": "0"}]}},
            {"label": "minus", "function": {"dim": 1, "pieces": [{"a": ["-1"], "b": "0"}]}}
        ],
        "robust_B": {"dim": 1, "ineqs": [["1", "2"], ["-1", "2"]]}
    }"#;

    #[test]
    fn parse_build_round_trip() {
        let f = InstanceFile::parse(PM).unwrap();
        let inst = f.build().unwrap();
        assert_eq!(inst.family.len(), 2);
        assert!(inst.robust_b.is_some());
        let again = InstanceFile::from_instance(&inst);
        let text = serde_json::to_string(&again).unwrap();
        assert_eq!(InstanceFile::parse(&text).unwrap().build().unwrap().digest(), inst.digest());
    }

    #[test]
    fn schema_violations() {
        assert!(InstanceFile::parse(&PM.replace("\"dim\": 1,\n        \"functions\"", "\"dim\": 1, \"extra\": 0,\n        \"functions\"")).is_err());
        assert!(InstanceFile::parse(&PM.replace("\"version\": 1", "\"version\": 2")).is_err());
        let bad_dim = PM.replace("{\"dim\": 1, \"ineqs\"", "{\"dim\": 2, \"ineqs\"");
        assert!(InstanceFile::parse(&bad_dim).and_then(|f| f.build()).is_err());
    }
}
