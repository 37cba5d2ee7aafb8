//! Tagged copies of a distribution family.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::distribution::DiscreteDistribution;
use crate::domain::{DomainPoint, LabeledExample};
use crate::error::Result;
use crate::hypothesis::{Hypothesis, HypothesisClass};

/// Domain `X x family`; each member ignores the tag.
#[derive(Clone, Debug)]
pub struct TaggedClass {
    inner: Arc<dyn HypothesisClass>,
}

fn strip(t: &[LabeledExample]) -> Option<Vec<LabeledExample>> {
    t.iter().map(|e| e.point.tag().map(|_| LabeledExample::new(e.point.untagged(), e.label))).collect()
}

impl TaggedClass {
    pub fn inner(&self) -> &Arc<dyn HypothesisClass> {
        &self.inner
    }
}

/// Port each distribution to its own tag (its index) and lift the class.
pub fn tagged_family(
    class: Arc<dyn HypothesisClass>,
    family: &[DiscreteDistribution],
) -> (TaggedClass, Vec<DiscreteDistribution>) {
    let fam = family.iter().enumerate().map(|(i, d)| d.tagged(i as u32)).collect();
    (TaggedClass { inner: class }, fam)
}

/// The tag shared by every point of a sample, if there is exactly one.
pub fn sample_tag(s: &[DomainPoint]) -> Option<u32> {
    let t = s.first()?.tag()?;
    s.iter().all(|x| x.tag() == Some(t)).then_some(t)
}

impl HypothesisClass for TaggedClass {
    fn name(&self) -> String {
        format!("tagged({})", self.inner.name())
    }

    fn is_consistent(&self, t: &[LabeledExample]) -> bool {
        strip(t).is_some_and(|s| self.inner.is_consistent(&s))
    }

    fn members(&self) -> Option<Vec<Hypothesis>> {
        Some(self.inner.members()?.into_iter().map(|h| Hypothesis::IgnoreTags(Arc::new(h))).collect())
    }

    fn first_consistent(&self, t: &[LabeledExample]) -> Result<Option<Hypothesis>> {
        let Some(s) = strip(t) else { return Ok(None) };
        Ok(self.inner.first_consistent(&s)?.map(|h| Hypothesis::IgnoreTags(Arc::new(h))))
    }

    fn shattering_oracle(&self, points: &[DomainPoint]) -> Option<bool> {
        let mut inner: Vec<DomainPoint> = Vec::with_capacity(points.len());
        for p in points {
            p.tag()?;
            inner.push(p.untagged());
        }
        inner.sort();
        let before = inner.len();
        inner.dedup();
        if inner.len() < before {
            // Two tagged copies of one point always share a label.
            return Some(false);
        }
        self.inner.shattering_oracle(&inner)
    }

    fn extension_labels(&self, t: &BTreeMap<DomainPoint, bool>, x: &DomainPoint) -> (bool, bool) {
        let mut v: Vec<LabeledExample> = t.iter().map(|(p, y)| LabeledExample::new(*p, *y)).collect();
        v.push(LabeledExample::new(*x, false));
        let zero = self.is_consistent(&v);
        v.last_mut().expect("nonempty").label = true;
        (zero, self.is_consistent(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::tv_distance;
    use crate::domain::loss_distribution;
    use crate::hypothesis::FiniteClass;
    use crate::rng::RandomSource;

    fn f(i: u64) -> DomainPoint {
        DomainPoint::flat(i)
    }

    #[test]
    fn point_masses_become_disjoint() {
        let class: Arc<dyn HypothesisClass> = Arc::new(FiniteClass::full(&[f(0)]));
        let fam = vec![DiscreteDistribution::point_mass(f(0)), DiscreteDistribution::point_mass(f(0))];
        let (_, tf) = tagged_family(class, &fam);
        assert_eq!(tv_distance(&fam[0], &fam[1]), 0.0);
        assert_eq!(tv_distance(&tf[0], &tf[1]), 1.0);
        assert_eq!(crate::construct::separation_constant(&tf), 0.0);
    }

    #[test]
    fn losses_are_preserved() {
        let dom = [f(0), f(1), f(2)];
        let class = Arc::new(FiniteClass::full(&dom));
        let d = DiscreteDistribution::new(vec![(f(0), 0.2), (f(1), 0.3), (f(2), 0.5)]).unwrap();
        let (tc, tf) = tagged_family(class.clone(), std::slice::from_ref(&d));
        let hs = class.members().unwrap();
        let ths = tc.members().unwrap();
        for (h, th) in hs.iter().zip(&ths) {
            for (g, tg) in hs.iter().zip(&ths) {
                let a = loss_distribution(h, &d, g).unwrap();
                let b = loss_distribution(th, &tf[0], tg).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn draws_carry_the_source_tag() {
        let class: Arc<dyn HypothesisClass> = Arc::new(FiniteClass::full(&[f(0), f(1)]));
        let fam = vec![
            DiscreteDistribution::uniform(vec![f(0), f(1)]).unwrap(),
            DiscreteDistribution::point_mass(f(1)),
        ];
        let (_, tf) = tagged_family(class, &fam);
        let mut r = RandomSource::new(4, 0);
        for (i, d) in tf.iter().enumerate() {
            for m in 1..6 {
                assert_eq!(sample_tag(&d.sample_iid(m, &mut r)), Some(i as u32));
            }
        }
    }

    #[test]
    fn duplicate_inner_points_not_shattered() {
        let class: Arc<dyn HypothesisClass> = Arc::new(crate::construct::RowClass::new(6, 2).unwrap());
        let (tc, _) = tagged_family(class, &[]);
        let p = DomainPoint::row(6, 1).unwrap();
        assert_eq!(tc.shattering_oracle(&[p.with_tag(0), p.with_tag(1)]), Some(false));
        assert_eq!(tc.shattering_oracle(&[p.with_tag(0)]), Some(true));
        let ls = [LabeledExample::new(p.with_tag(0), true), LabeledExample::new(p.with_tag(1), false)];
        assert!(!tc.is_consistent(&ls));
    }
}
