use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::hypothesis::{collapse, HypothesisClass};

/// Projection `H|S` on the collapsed support of `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorSet {
    pub points: Vec<DomainPoint>,
    pub multiplicities: Vec<usize>,
    pub behaviors: Vec<Vec<bool>>,
}

impl BehaviorSet {
    pub fn new(points: Vec<DomainPoint>, multiplicities: Vec<usize>, mut behaviors: Vec<Vec<bool>>) -> Result<Self> {
        let d = points.len();
        if multiplicities.len() != d || multiplicities.contains(&0) {
            return Err(Error::InvalidParameter("one positive multiplicity per point".into()));
        }
        if behaviors.iter().any(|b| b.len() != d) {
            return Err(Error::InvalidParameter(format!("behaviors must have length {d}")));
        }
        behaviors.sort();
        if behaviors.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate behavior".into()));
        }
        Ok(Self { points, multiplicities, behaviors })
    }

    /// Behaviors on `d` anonymous points of multiplicity one.
    pub fn from_bits(behaviors: Vec<Vec<bool>>) -> Result<Self> {
        let d = behaviors.first().map_or(0, Vec::len);
        Self::new((0..d as u64).map(DomainPoint::flat).collect(), vec![1; d], behaviors)
    }

    /// `|S|` counted with multiplicity.
    pub fn sample_size(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn dimension(&self) -> usize {
        self.points.len()
    }
}

pub fn project_behaviors(class: &dyn HypothesisClass, s: &[DomainPoint], cap: usize) -> Result<BehaviorSet> {
    let (points, multiplicities) = collapse(s);
    let behaviors = class.project(&points, cap)?;
    BehaviorSet::new(points, multiplicities, behaviors)
}

/// Edge between behaviors differing only at `coord`; `zero` carries 0 there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub zero: usize,
    pub one: usize,
    pub coord: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneInclusionGraph {
    pub vertices: Vec<Vec<bool>>,
    pub edges: Vec<Edge>,
    /// `|S|` with multiplicity, the transductive normalizer.
    pub sample_size: usize,
}

/// Hamming-1 pairs. A coordinate whose point repeats in `S` carries no
/// edges: flipping one copy would not be a behavior.
pub fn build_one_inclusion_graph(b: &BehaviorSet) -> OneInclusionGraph {
    let index: HashMap<&[bool], usize> = b.behaviors.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let mut edges = Vec::new();
    let mut flipped = Vec::new();
    for (i, v) in b.behaviors.iter().enumerate() {
        for c in 0..v.len() {
            if v[c] || b.multiplicities[c] != 1 {
                continue;
            }
            flipped.clear();
            flipped.extend_from_slice(v);
            flipped[c] = true;
            if let Some(&j) = index.get(flipped.as_slice()) {
                edges.push(Edge { zero: i, one: j, coord: c });
            }
        }
    }
    OneInclusionGraph { vertices: b.behaviors.clone(), edges, sample_size: b.sample_size() }
}

impl OneInclusionGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Cube dimension when the vertices are all of `{0,1}^d`.
    pub fn full_cube_dimension(&self) -> Option<usize> {
        let d = self.vertices.first().map_or(0, Vec::len);
        (d < usize::BITS as usize && self.vertices.len() == 1 << d && self.edges.len() == d << d.saturating_sub(1))
            .then_some(d)
    }

    /// The edge joining two vertices, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.iter().position(|e| (e.zero == a && e.one == b) || (e.zero == b && e.one == a))
    }
}

/// Every vertex of `{0,1}^n`, lexicographic.
pub fn full_cube(n: usize) -> BehaviorSet {
    let rows = (0..1u64 << n).map(|v| (0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect()).collect();
    BehaviorSet::from_bits(rows).expect("distinct rows")
}
