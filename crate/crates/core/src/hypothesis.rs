//! Hypotheses and hypothesis classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::distribution::DiscreteDistribution;
use crate::domain::{loss_distribution, DomainPoint, LabeledExample, Labeling, Predictor};
use crate::error::{Error, Result};

/// Default cap on projected behaviors.
pub const DEFAULT_VERTEX_CAP: usize = 4096;

/// A row-class member: `M` columns of row `n` carry `minority`, the rest of
/// the row carries the opposite label, every other point is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowHypothesis {
    pub n: u32,
    pub minority: bool,
    pub cols: Arc<BTreeSet<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// Explicit labels plus an optional label for every other point.
    Table { labels: Arc<BTreeMap<DomainPoint, bool>>, default: Option<bool> },
    Row(RowHypothesis),
    /// Labels `(x, tag)` like the wrapped hypothesis labels `x`.
    IgnoreTags(Arc<Hypothesis>),
}

impl Hypothesis {
    pub fn table(labels: impl IntoIterator<Item = (DomainPoint, bool)>, default: Option<bool>) -> Self {
        Hypothesis::Table { labels: Arc::new(labels.into_iter().collect()), default }
    }

    pub fn constant(label: bool) -> Self {
        Self::table([], Some(label))
    }

    pub fn label(&self, x: &DomainPoint) -> Option<bool> {
        match self {
            Hypothesis::Table { labels, default } => labels.get(x).copied().or(*default),
            Hypothesis::Row(h) => {
                if x.tag().is_some() {
                    return None;
                }
                Some(match x.as_row() {
                    Some((r, c)) if r == h.n => h.cols.contains(&c) == h.minority,
                    _ => false,
                })
            }
            Hypothesis::IgnoreTags(h) => h.label(&x.untagged()),
        }
    }

    pub fn agrees_with(&self, t: &[LabeledExample]) -> bool {
        t.iter().all(|e| self.label(&e.point) == Some(e.label))
    }

    pub fn behavior(&self, points: &[DomainPoint]) -> Option<Vec<bool>> {
        points.iter().map(|x| self.label(x)).collect()
    }
}

impl Labeling for Hypothesis {
    fn label_of(&self, x: &DomainPoint) -> Result<bool> {
        self.label(x).ok_or(Error::UndefinedPoint(*x))
    }
}

impl Predictor for Hypothesis {
    fn prob_one(&self, x: &DomainPoint) -> Result<f64> {
        self.label_of(x).map(|b| f64::from(u8::from(b)))
    }
}

/// Binary vector as a `0`/`1` string.
pub fn bits_to_string(b: &[bool]) -> String {
    b.iter().map(|&v| if v { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidParameter(format!("`{s}` is not a bit-string"))),
        })
        .collect()
}

/// Collapse a sample to distinct sorted points with multiplicities.
pub fn collapse(points: &[DomainPoint]) -> (Vec<DomainPoint>, Vec<usize>) {
    let mut m: BTreeMap<DomainPoint, usize> = BTreeMap::new();
    for x in points {
        *m.entry(*x).or_default() += 1;
    }
    m.into_iter().unzip()
}

/// Collapse a labeled sample; `None` when a point carries both labels.
pub fn collapse_labeled(t: &[LabeledExample]) -> Option<BTreeMap<DomainPoint, bool>> {
    let mut m = BTreeMap::new();
    for e in t {
        if *m.entry(e.point).or_insert(e.label) != e.label {
            return None;
        }
    }
    Some(m)
}

/// Finite or implicitly represented family of labelings.
pub trait HypothesisClass: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    /// Does some member agree with every example?
    fn is_consistent(&self, t: &[LabeledExample]) -> bool;

    /// Explicit members in canonical order, when enumerable.
    fn members(&self) -> Option<Vec<Hypothesis>> {
        None
    }

    /// First consistent member in canonical order.
    fn first_consistent(&self, t: &[LabeledExample]) -> Result<Option<Hypothesis>> {
        let ms = self.members().ok_or_else(|| Error::OracleUnavailable(self.name()))?;
        Ok(ms.into_iter().find(|h| h.agrees_with(t)))
    }

    /// A consistent member maximizing `L(h, D_truth)`, with that loss.
    fn worst_consistent(
        &self,
        t: &[LabeledExample],
        truth: &dyn Labeling,
        d: &DiscreteDistribution,
    ) -> Result<Option<(Hypothesis, f64)>> {
        let ms = self.members().ok_or_else(|| Error::OracleUnavailable(self.name()))?;
        let mut best: Option<(Hypothesis, f64)> = None;
        for h in ms.into_iter().filter(|h| h.agrees_with(t)) {
            let l = loss_distribution(&h, d, truth)?;
            if best.as_ref().is_none_or(|b| l > b.1) {
                best = Some((h, l));
            }
        }
        Ok(best)
    }

    /// Analytic shattering answer, if the class has one.
    fn shattering_oracle(&self, _points: &[DomainPoint]) -> Option<bool> {
        None
    }

    /// Which labels of a new point `x` keep the collapsed sample `t` consistent,
    /// as `(0 allowed, 1 allowed)`.
    fn extension_labels(&self, t: &BTreeMap<DomainPoint, bool>, x: &DomainPoint) -> (bool, bool) {
        let mut v: Vec<LabeledExample> = t.iter().map(|(p, y)| LabeledExample::new(*p, *y)).collect();
        v.push(LabeledExample::new(*x, false));
        let zero = self.is_consistent(&v);
        v.last_mut().expect("nonempty").label = true;
        (zero, self.is_consistent(&v))
    }

    /// Shattering oracle on `keys(t) + {x}` for `x` outside `t`.
    fn shattering_oracle_extended(&self, t: &BTreeMap<DomainPoint, bool>, x: &DomainPoint) -> Option<bool> {
        let mut pts: Vec<DomainPoint> = t.keys().copied().collect();
        pts.push(*x);
        pts.sort();
        self.shattering_oracle(&pts)
    }

    /// Distinct behaviors on distinct `points`, in lexicographic order.
    fn project(&self, points: &[DomainPoint], cap: usize) -> Result<Vec<Vec<bool>>> {
        let mut out = Vec::new();
        let mut partial: Vec<LabeledExample> = Vec::with_capacity(points.len());
        dfs_project(self, points, &mut partial, &mut out, cap)?;
        Ok(out)
    }
}

fn dfs_project<C: HypothesisClass + ?Sized>(
    class: &C,
    points: &[DomainPoint],
    partial: &mut Vec<LabeledExample>,
    out: &mut Vec<Vec<bool>>,
    cap: usize,
) -> Result<()> {
    if partial.len() == points.len() {
        if out.len() == cap {
            return Err(Error::ProjectionTooLarge { cap });
        }
        out.push(partial.iter().map(|e| e.label).collect());
        return Ok(());
    }
    let x = points[partial.len()];
    for y in [false, true] {
        partial.push(LabeledExample::new(x, y));
        if class.is_consistent(partial) {
            dfs_project(class, points, partial, out, cap)?;
        }
        partial.pop();
    }
    Ok(())
}

/// Projection through explicit members.
pub fn project_members(members: &[Hypothesis], points: &[DomainPoint], cap: usize) -> Result<Vec<Vec<bool>>> {
    let set: BTreeSet<Vec<bool>> = members.iter().filter_map(|h| h.behavior(points)).collect();
    if set.len() > cap {
        return Err(Error::ProjectionTooLarge { cap });
    }
    Ok(set.into_iter().collect())
}

/// Does the class realize all `2^k` labelings of the distinct points?
pub fn shatter_check(class: &dyn HypothesisClass, points: &[DomainPoint]) -> Result<bool> {
    let (pts, _) = collapse(points);
    if pts.is_empty() {
        return Ok(true);
    }
    if let Some(b) = class.shattering_oracle(&pts) {
        return Ok(b);
    }
    if pts.len() > 20 {
        return Err(Error::CapExceeded(format!("shatter check on {} points without an oracle", pts.len())));
    }
    let full = 1usize << pts.len();
    Ok(class.project(&pts, full)?.len() == full)
}

/// Explicitly enumerated class.
#[derive(Clone, Debug)]
pub struct FiniteClass {
    name: String,
    members: Vec<Hypothesis>,
}

impl FiniteClass {
    pub fn new(name: impl Into<String>, members: Vec<Hypothesis>) -> Self {
        Self { name: name.into(), members }
    }

    pub fn singleton(h: Hypothesis) -> Self {
        Self::new("singleton", vec![h])
    }

    /// Members given as bit-strings over `domain` (undefined elsewhere).
    pub fn from_bits(name: impl Into<String>, domain: &[DomainPoint], rows: &[Vec<bool>]) -> Self {
        let members = rows
            .iter()
            .map(|r| Hypothesis::table(domain.iter().copied().zip(r.iter().copied()), None))
            .collect();
        Self::new(name, members)
    }

    /// All `2^k` labelings of `domain`, lexicographic with the first point as
    /// the most significant bit.
    pub fn full(domain: &[DomainPoint]) -> Self {
        let k = domain.len();
        let rows: Vec<Vec<bool>> =
            (0..1u64 << k).map(|v| (0..k).map(|i| v >> (k - 1 - i) & 1 == 1).collect()).collect();
        Self::from_bits(format!("full-{k}"), domain, &rows)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl HypothesisClass for FiniteClass {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn is_consistent(&self, t: &[LabeledExample]) -> bool {
        self.members.iter().any(|h| h.agrees_with(t))
    }

    fn members(&self) -> Option<Vec<Hypothesis>> {
        Some(self.members.clone())
    }

    fn project(&self, points: &[DomainPoint], cap: usize) -> Result<Vec<Vec<bool>>> {
        project_members(&self.members, points, cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: u64) -> DomainPoint {
        DomainPoint::flat(i)
    }

    #[test]
    fn full_class_order_and_projection() {
        let c = FiniteClass::full(&[f(0), f(1)]);
        assert_eq!(c.len(), 4);
        let t = [LabeledExample::new(f(0), false)];
        let h = c.first_consistent(&t).unwrap().unwrap();
        assert_eq!(h.behavior(&[f(0), f(1)]).unwrap(), vec![false, false]);
        assert_eq!(c.project(&[f(0), f(1)], 16).unwrap().len(), 4);
        assert!(matches!(c.project(&[f(0), f(1)], 3), Err(Error::ProjectionTooLarge { cap: 3 })));
    }

    #[test]
    fn dfs_projection_matches_members() {
        #[derive(Debug)]
        struct Implicit(FiniteClass);
        impl HypothesisClass for Implicit {
            fn name(&self) -> String {
                "implicit".into()
            }
            fn is_consistent(&self, t: &[LabeledExample]) -> bool {
                self.0.is_consistent(t)
            }
        }
        let dom = [f(0), f(1), f(2)];
        let rows = vec![vec![false, false, true], vec![true, false, true], vec![true, true, false]];
        let c = FiniteClass::from_bits("c", &dom, &rows);
        assert_eq!(Implicit(c.clone()).project(&dom, 100).unwrap(), c.project(&dom, 100).unwrap());
    }

    #[test]
    fn shatter_examples() {
        let single = FiniteClass::singleton(Hypothesis::constant(true));
        assert!(shatter_check(&single, &[]).unwrap());
        assert!(!shatter_check(&single, &[f(0)]).unwrap());
        let full = FiniteClass::full(&[f(0), f(1), f(2)]);
        assert!(shatter_check(&full, &[f(2), f(0), f(2)]).unwrap());
    }

    #[test]
    fn worst_consistent_by_enumeration() {
        let dom = [f(0), f(1)];
        let c = FiniteClass::full(&dom);
        let d = DiscreteDistribution::uniform(dom.to_vec()).unwrap();
        let truth = Hypothesis::table([(f(0), false), (f(1), true)], None);
        let t = [LabeledExample::new(f(0), false)];
        let (_, l) = c.worst_consistent(&t, &truth, &d).unwrap().unwrap();
        assert_eq!(l, 0.5);
    }

    #[test]
    fn bits_round_trip() {
        let b = parse_bits("0110").unwrap();
        assert_eq!(bits_to_string(&b), "0110");
        assert!(parse_bits("012").is_err());
    }
}
