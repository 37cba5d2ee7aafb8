use std::collections::BTreeMap;
use std::sync::Arc;

use super::graph::{build_one_inclusion_graph, project_behaviors, BehaviorSet};
use super::orient::min_max_fractional_orientation;
use crate::domain::{DomainPoint, LabeledExample, Predictor};
use crate::error::{Error, Result};
use crate::hypothesis::{collapse, collapse_labeled, HypothesisClass, DEFAULT_VERTEX_CAP};
use crate::learners::Learner;
use crate::rng::RandomSource;

/// The one-inclusion-graph learner.
#[derive(Clone, Debug)]
pub struct OigLearner {
    pub class: Arc<dyn HypothesisClass>,
    pub cap: usize,
}

impl OigLearner {
    pub fn new(class: Arc<dyn HypothesisClass>) -> Self {
        Self { class, cap: DEFAULT_VERTEX_CAP }
    }
}

impl Learner for OigLearner {
    fn name(&self) -> String {
        "oig".into()
    }

    fn train(&self, t: &[LabeledExample], _: &mut RandomSource) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(OigPredictor::new(self.class.clone(), t, self.cap)?))
    }
}

/// Holds the training sample; every query builds the graph on `supp(T) + {x}`.
/// `predict` draws afresh on each call.
#[derive(Clone, Debug)]
pub struct OigPredictor {
    class: Arc<dyn HypothesisClass>,
    labels: BTreeMap<DomainPoint, bool>,
    multiplicity: BTreeMap<DomainPoint, usize>,
    cap: usize,
}

impl OigPredictor {
    pub fn new(class: Arc<dyn HypothesisClass>, t: &[LabeledExample], cap: usize) -> Result<Self> {
        let labels = collapse_labeled(t).ok_or_else(|| Error::InconsistentTraining(class.name()))?;
        if !class.is_consistent(t) {
            return Err(Error::InconsistentTraining(class.name()));
        }
        let mut multiplicity = BTreeMap::new();
        for e in t {
            *multiplicity.entry(e.point).or_insert(0) += 1;
        }
        Ok(Self { class, labels, multiplicity, cap })
    }

    fn general(&self, x: &DomainPoint) -> Result<f64> {
        let mut points: Vec<DomainPoint> = self.labels.keys().copied().collect();
        let pos = points.partition_point(|p| p < x);
        points.insert(pos, *x);
        let mut mult: Vec<usize> = self.multiplicity.values().copied().collect();
        mult.insert(pos, 1);
        let behaviors = self.class.project(&points, self.cap)?;
        let bs = BehaviorSet::new(points, mult, behaviors)?;
        let g = build_one_inclusion_graph(&bs);
        let find = |y: bool| {
            bs.behaviors.iter().position(|b| {
                b[pos] == y && bs.points.iter().zip(b).all(|(p, v)| p == x || self.labels.get(p) == Some(v))
            })
        };
        let (Some(u), Some(v)) = (find(false), find(true)) else {
            return Err(Error::Solver("projection lost a consistent behavior".into()));
        };
        let e = g.edge_between(u, v).ok_or_else(|| Error::Solver("consistent behaviors are not adjacent".into()))?;
        let o = min_max_fractional_orientation(&g)?;
        Ok(o.masses[e].0)
    }
}

impl Predictor for OigPredictor {
    fn prob_one(&self, x: &DomainPoint) -> Result<f64> {
        if let Some(&y) = self.labels.get(x) {
            return Ok(f64::from(u8::from(y)));
        }
        match self.class.extension_labels(&self.labels, x) {
            (false, false) => Err(Error::UndefinedPoint(*x)),
            (true, false) => Ok(0.0),
            (false, true) => Ok(1.0),
            (true, true) => {
                if self.class.shattering_oracle_extended(&self.labels, x) == Some(true) {
                    // Shattered: the graph is a union of cubes, where half of
                    // every edge in each direction is optimal.
                    Ok(0.5)
                } else {
                    self.general(x)
                }
            }
        }
    }
}

/// One OIG prediction at `x` after training on `t`.
pub fn oig_predict(
    class: Arc<dyn HypothesisClass>,
    t: &[LabeledExample],
    x: &DomainPoint,
    rng: &mut RandomSource,
) -> Result<bool> {
    OigPredictor::new(class, t, DEFAULT_VERTEX_CAP)?.predict(x, rng)
}

/// `max_h (1/|S|) sum_i P[A(S_h^(-i))(x_i) != h(x_i)]`, exact in the
/// predictor's own randomness.
pub fn transductive_error(
    learner: &dyn Learner,
    class: &dyn HypothesisClass,
    s: &[DomainPoint],
    cap: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let (points, _) = collapse(s);
    let behaviors = class.project(&points, cap)?;
    let mut worst: f64 = 0.0;
    for b in &behaviors {
        let label = |x: &DomainPoint| b[points.binary_search(x).expect("point of S")];
        let full: Vec<LabeledExample> = s.iter().map(|x| LabeledExample::new(*x, label(x))).collect();
        let mut err = 0.0;
        for i in 0..s.len() {
            let mut t = full.clone();
            let held = t.remove(i);
            let p = learner.train(&t, rng)?.prob_one(&held.point)?;
            err += if held.label { 1.0 - p } else { p };
        }
        worst = worst.max(err / s.len() as f64);
    }
    Ok(worst)
}

/// OIG transductive error from the orientation value: `value / |S|`.
pub fn oig_transductive_error(class: &dyn HypothesisClass, s: &[DomainPoint], cap: usize) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let g = build_one_inclusion_graph(&project_behaviors(class, s, cap)?);
    Ok(min_max_fractional_orientation(&g)?.value / s.len() as f64)
}
