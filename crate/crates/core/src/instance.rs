//! Instances: r parts of group elements plus an r-partite hypergraph over
//! them, and their JSON form.

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::group::{GroupElem, GroupSpec};
use crate::hypergraph::PartiteHypergraph;
use crate::sumset::ElemSet;

#[derive(Debug, Clone)]
pub struct Instance {
    spec: GroupSpec,
    parts: Vec<ElemSet>,
    hypergraph: PartiteHypergraph,
    generator: Option<serde_json::Value>,
}

impl Instance {
    /// Builds an instance from parts given in any order. Each part is sorted
    /// into canonical element order and edge positions are remapped to match.
    pub fn new(spec: GroupSpec, parts: Vec<Vec<GroupElem>>, edges: Vec<Vec<usize>>) -> Result<Self> {
        let (parts, remap) = canonical_parts(&spec, parts)?;
        let sizes: Vec<usize> = parts.iter().map(ElemSet::len).collect();
        let mut mapped = Vec::with_capacity(edges.len());
        for e in edges {
            if e.len() != sizes.len() {
                return Err(Error::ArityMismatch {
                    expected: sizes.len(),
                    got: e.len(),
                });
            }
            let mut m = Vec::with_capacity(e.len());
            for (i, &v) in e.iter().enumerate() {
                let new = *remap[i].get(v).ok_or_else(|| {
                    out_of_range(format!("edge {e:?}: position {v} in part {i} of size {}", sizes[i]))
                })?;
                m.push(new);
            }
            mapped.push(m);
        }
        let hypergraph = PartiteHypergraph::build(sizes, mapped)?;
        Ok(Instance {
            spec,
            parts,
            hypergraph,
            generator: None,
        })
    }

    /// All tuples are edges.
    pub fn complete(spec: GroupSpec, parts: Vec<Vec<GroupElem>>) -> Result<Self> {
        let (parts, _) = canonical_parts(&spec, parts)?;
        let sizes = parts.iter().map(ElemSet::len).collect();
        Ok(Instance {
            spec,
            parts,
            hypergraph: PartiteHypergraph::complete(sizes)?,
            generator: None,
        })
    }

    /// Pairs already-canonical parts with a hypergraph over their positions.
    pub fn from_parts(parts: Vec<ElemSet>, hypergraph: PartiteHypergraph) -> Result<Self> {
        let spec = parts.first().ok_or(Error::ArityMismatch { expected: 2, got: 0 })?.spec().clone();
        if parts.len() < 2 {
            return Err(Error::ArityMismatch { expected: 2, got: parts.len() });
        }
        if parts.iter().any(|p| p.spec() != &spec) {
            return Err(Error::SpecMismatch);
        }
        let sizes: Vec<usize> = parts.iter().map(ElemSet::len).collect();
        if sizes != hypergraph.part_sizes() {
            return Err(Error::ArityMismatch {
                expected: sizes.len(),
                got: hypergraph.r(),
            });
        }
        Ok(Instance {
            spec,
            parts,
            hypergraph,
            generator: None,
        })
    }

    pub fn with_generator(mut self, generator: serde_json::Value) -> Self {
        self.generator = Some(generator);
        self
    }

    pub fn generator(&self) -> Option<&serde_json::Value> {
        self.generator.as_ref()
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[ElemSet] {
        &self.parts
    }

    pub fn part_sizes(&self) -> &[usize] {
        self.hypergraph.part_sizes()
    }

    pub fn hypergraph(&self) -> &PartiteHypergraph {
        &self.hypergraph
    }

    pub fn elem(&self, part: usize, v: usize) -> &GroupElem {
        &self.parts[part].elems()[v]
    }

    /// Group sum of the elements named by a tuple of positions.
    pub fn edge_sum(&self, e: &[u32]) -> GroupElem {
        self.spec
            .sum_tuple(e.iter().enumerate().map(|(i, &v)| self.elem(i, v as usize)))
            .expect("parts conform to the spec")
    }

    pub fn tuple_sum(&self, e: &[usize]) -> GroupElem {
        self.spec
            .sum_tuple(e.iter().enumerate().map(|(i, &v)| self.elem(i, v)))
            .expect("parts conform to the spec")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = InstanceDoc {
            group: self.spec.clone(),
            parts: self.parts.iter().map(|p| p.elems().to_vec()).collect(),
            edges: EdgesDoc::List(
                self.hypergraph
                    .edges()
                    .map(|e| e.iter().map(|&v| v as usize).collect())
                    .collect(),
            ),
            generator: self.generator.clone(),
        };
        serde_json::to_value(doc).expect("instance serializes")
    }

    /// Canonical JSON: sorted keys, parts in element order, edges sorted.
    pub fn to_json(&self) -> String {
        crate::report::canonical_json(&self.to_json_value())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: InstanceDoc =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("instance JSON: {e}")))?;
        let inst = match doc.edges {
            EdgesDoc::Keyword(k) if k == "complete" => Instance::complete(doc.group, doc.parts)?,
            EdgesDoc::Keyword(k) => {
                return Err(Error::Parse(format!("unknown edges keyword {k:?}")));
            }
            EdgesDoc::List(edges) => Instance::new(doc.group, doc.parts, edges)?,
        };
        if inst.r() < 2 {
            return Err(Error::ArityMismatch { expected: 2, got: inst.r() });
        }
        Ok(match doc.generator {
            Some(g) => inst.with_generator(g),
            None => inst,
        })
    }
}

fn canonical_parts(
    spec: &GroupSpec,
    parts: Vec<Vec<GroupElem>>,
) -> Result<(Vec<ElemSet>, Vec<Vec<usize>>)> {
    let mut sets = Vec::with_capacity(parts.len());
    let mut remaps = Vec::with_capacity(parts.len());
    for (i, part) in parts.into_iter().enumerate() {
        let canon = part
            .iter()
            .map(|e| spec.canonicalize(e))
            .collect::<Result<Vec<_>>>()?;
        let set = ElemSet::new(spec, canon.iter().cloned())?;
        if set.len() != canon.len() {
            return Err(Error::ConfigInvalid(format!("part {i} contains a repeated element")));
        }
        remaps.push(canon.iter().map(|e| set.position(e).expect("present")).collect());
        sets.push(set);
    }
    Ok((sets, remaps))
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    group: GroupSpec,
    parts: Vec<Vec<GroupElem>>,
    edges: EdgesDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgesDoc {
    Keyword(String),
    List(Vec<Vec<usize>>),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_are_sorted_and_edges_follow() {
        let g = GroupSpec::integers();
        let inst = Instance::new(
            g.clone(),
            vec![vec![g.embed(5), g.embed(1)], vec![g.embed(2)]],
            vec![vec![0, 0]],
        )
        .unwrap();
        // 5 moved to position 1.
        assert!(inst.hypergraph().contains_positions(&[1, 0]));
        assert_eq!(inst.edge_sum(&[1u32, 0]), g.embed(7));
    }

    #[test]
    fn repeated_elements_are_rejected() {
        let g = GroupSpec::cyclic(3).unwrap();
        let err = Instance::new(g.clone(), vec![vec![g.embed(1), g.embed(4)], vec![g.embed(0)]], vec![]);
        assert!(matches!(err, Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn json_round_trip_and_complete_shorthand() {
        let text = r#"{"group":{"moduli":[0]},"parts":[[[2],[0],[1]],[[0],[1]]],"edges":"complete"}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.hypergraph().edge_count(), 6);
        let canon = inst.to_json();
        let again = Instance::from_json(&canon).unwrap();
        assert_eq!(again.to_json(), canon);
        assert!(canon.contains("\"edges\""));
        let listed = r#"{"group":{"moduli":[5]},"parts":[[[0],[1]],[[3],[4]]],"edges":[[1,1],[0,0],[1,1]]}"#;
        let inst = Instance::from_json(listed).unwrap();
        assert_eq!(inst.hypergraph().edge_count(), 2);
        let bad = r#"{"group":{"moduli":[5]},"parts":[[[0]],[[3]]],"edges":[[1,0]]}"#;
        assert!(matches!(Instance::from_json(bad), Err(Error::IndexOutOfRange(_))));
    }
}
