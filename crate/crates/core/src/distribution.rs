//! Finite-support marginals.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Masses must sum to one within this tolerance.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
enum Sampler {
    Uniform,
    Weighted(WeightedIndex<f64>),
}

#[derive(Clone, Debug)]
pub struct DiscreteDistribution {
    support: Vec<(DomainPoint, f64)>,
    index: HashMap<DomainPoint, usize>,
    sampler: Sampler,
}

impl PartialEq for DiscreteDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support
    }
}

impl DiscreteDistribution {
    /// Validating constructor: masses strictly positive, points distinct,
    /// total one within [`MASS_TOLERANCE`].
    pub fn new(support: Vec<(DomainPoint, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut index = HashMap::with_capacity(support.len());
        let mut total = 0.0;
        for (i, &(x, w)) in support.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidDistribution(format!("mass {w} at {x}")));
            }
            if index.insert(x, i).is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate point {x}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        let first = support[0].1;
        let sampler = if support.iter().all(|&(_, w)| w == first) {
            Sampler::Uniform
        } else {
            let w = WeightedIndex::new(support.iter().map(|&(_, w)| w))
                .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
            Sampler::Weighted(w)
        };
        Ok(Self { support, index, sampler })
    }

    /// Normalize nonnegative weights; zero weights are dropped.
    pub fn from_weights(weights: Vec<(DomainPoint, f64)>) -> Result<Self> {
        let total: f64 = weights.iter().map(|&(_, w)| w).sum();
        if !(total > 0.0) || weights.iter().any(|&(_, w)| w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be nonnegative with positive total".into()));
        }
        let mut v: Vec<_> = weights.into_iter().filter(|&(_, w)| w > 0.0).map(|(x, w)| (x, w / total)).collect();
        // Pin the sum to one exactly enough for the validator.
        let s: f64 = v.iter().map(|&(_, w)| w).sum();
        if let Some(last) = v.last_mut() {
            last.1 += 1.0 - s;
        }
        Self::new(v)
    }

    pub fn uniform(points: Vec<DomainPoint>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let w = 1.0 / n as f64;
        let mut d = Self::new_unchecked_sum(points.into_iter().map(|x| (x, w)).collect())?;
        d.sampler = Sampler::Uniform;
        Ok(d)
    }

    // Uniform masses 1/n may not sum to one within 1e-12 for huge n.
    fn new_unchecked_sum(support: Vec<(DomainPoint, f64)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(support.len());
        for (i, &(x, _)) in support.iter().enumerate() {
            if index.insert(x, i).is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate point {x}")));
            }
        }
        Ok(Self { support, index, sampler: Sampler::Uniform })
    }

    pub fn point_mass(x: DomainPoint) -> Self {
        Self::new(vec![(x, 1.0)]).expect("point mass is valid")
    }

    pub fn support(&self) -> &[(DomainPoint, f64)] {
        &self.support
    }

    pub fn points(&self) -> impl Iterator<Item = DomainPoint> + '_ {
        self.support.iter().map(|&(x, _)| x)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, x: &DomainPoint) -> bool {
        self.index.contains_key(x)
    }

    pub fn mass(&self, x: &DomainPoint) -> f64 {
        self.index.get(x).map_or(0.0, |&i| self.support[i].1)
    }

    /// `D[Y]`.
    pub fn mass_of<'a>(&self, ys: impl IntoIterator<Item = &'a DomainPoint>) -> f64 {
        ys.into_iter().collect::<BTreeSet<_>>().into_iter().map(|y| self.mass(y)).sum()
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.sampler, Sampler::Uniform)
    }

    pub fn sample_index(&self, rng: &mut RandomSource) -> usize {
        match &self.sampler {
            Sampler::Uniform => rng.random_range(0..self.support.len()),
            Sampler::Weighted(w) => w.sample(rng),
        }
    }

    pub fn sample(&self, rng: &mut RandomSource) -> DomainPoint {
        self.support[self.sample_index(rng)].0
    }

    /// `m` i.i.d. draws.
    pub fn sample_iid(&self, m: usize, rng: &mut RandomSource) -> Vec<DomainPoint> {
        (0..m).map(|_| self.sample(rng)).collect()
    }

    /// Same distribution with every point tagged.
    pub fn tagged(&self, tag: u32) -> Self {
        let v = self.support.iter().map(|&(x, w)| (x.with_tag(tag), w)).collect();
        let mut d = Self::new_unchecked_sum(v).expect("tagging keeps points distinct");
        d.sampler = self.sampler.clone();
        d
    }
}

pub fn sample_iid(d: &DiscreteDistribution, m: usize, rng: &mut RandomSource) -> Vec<DomainPoint> {
    d.sample_iid(m, rng)
}

/// Half the L1 distance over the union of supports.
pub fn tv_distance(a: &DiscreteDistribution, b: &DiscreteDistribution) -> f64 {
    let mut diff: BTreeMap<DomainPoint, f64> = BTreeMap::new();
    for &(x, w) in a.support() {
        *diff.entry(x).or_default() += w;
    }
    for &(x, w) in b.support() {
        *diff.entry(x).or_default() -= w;
    }
    (0.5 * diff.values().map(|v| v.abs()).sum::<f64>()).clamp(0.0, 1.0)
}

/// `D` conditioned on `Y`.
pub fn conditional_distribution(d: &DiscreteDistribution, ys: &[DomainPoint]) -> Result<DiscreteDistribution> {
    let keep: BTreeSet<_> = ys.iter().collect();
    let v: Vec<_> = d.support().iter().copied().filter(|(x, _)| keep.contains(x)).collect();
    if v.is_empty() {
        return Err(Error::ZeroMassEvent);
    }
    DiscreteDistribution::from_weights(v)
}

/// Uniform distribution on the multiset `s`.
pub fn empirical_distribution(s: &[DomainPoint]) -> Result<DiscreteDistribution> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts: BTreeMap<DomainPoint, usize> = BTreeMap::new();
    for x in s {
        *counts.entry(*x).or_default() += 1;
    }
    let n = s.len() as f64;
    let first = *counts.values().next().expect("nonempty");
    if counts.values().all(|&c| c == first) {
        return DiscreteDistribution::uniform(counts.into_keys().collect());
    }
    DiscreteDistribution::from_weights(counts.into_iter().map(|(x, c)| (x, c as f64 / n)).collect())
}

/// Probability that `m` uniform draws from `big_m` points are distinct:
/// `M (M-1) ... (M-m+1) / M^m`.
pub fn gamma_no_duplicates(m: u64, big_m: u64) -> f64 {
    if m > big_m {
        return 0.0;
    }
    let bm = big_m as f64;
    (0..m).map(|j| (bm - j as f64) / bm).product()
}

#[derive(Serialize, Deserialize)]
struct Repr {
    support: Vec<(DomainPoint, f64)>,
}

impl Serialize for DiscreteDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr { support: self.support.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        DiscreteDistribution::new(r.support).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: u64) -> DomainPoint {
        DomainPoint::flat(i)
    }

    fn unif(ids: &[u64]) -> DiscreteDistribution {
        DiscreteDistribution::uniform(ids.iter().map(|&i| f(i)).collect()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(DiscreteDistribution::new(vec![(f(0), 0.5), (f(0), 0.5)]).is_err());
        assert!(DiscreteDistribution::new(vec![(f(0), 0.5), (f(1), 0.4)]).is_err());
        assert!(DiscreteDistribution::new(vec![(f(0), 1.0), (f(1), 0.0)]).is_err());
        assert!(DiscreteDistribution::new(vec![(f(0), 0.25), (f(1), 0.75)]).is_ok());
    }

    #[test]
    fn tv_examples() {
        let d = unif(&[1, 2, 3, 4]);
        assert_eq!(tv_distance(&d, &d), 0.0);
        assert!((tv_distance(&d, &unif(&[1, 2])) - 0.5).abs() < 1e-15);
        assert_eq!(tv_distance(&unif(&[1]), &unif(&[2])), 1.0);
    }

    #[test]
    fn conditional_examples() {
        let d = unif(&[1, 2, 3, 4]);
        let c = conditional_distribution(&d, &[f(1), f(2)]).unwrap();
        assert!(tv_distance(&c, &unif(&[1, 2])) < 1e-15);
        let pm = unif(&[7]);
        assert_eq!(conditional_distribution(&pm, &[f(7)]).unwrap(), pm);
        assert!(matches!(conditional_distribution(&pm, &[f(8)]), Err(Error::ZeroMassEvent)));
        // tv(D|Y, D') >= tv(D, D') - D[X \ Y]: 0 >= 0.5 - 0.5
        let dp = unif(&[1, 2]);
        let lhs = tv_distance(&c, &dp);
        let rhs = tv_distance(&d, &dp) - (1.0 - d.mass_of(&[f(1), f(2)]));
        assert!(lhs.abs() < 1e-15 && rhs.abs() < 1e-15);
    }

    #[test]
    fn empirical_examples() {
        let e = empirical_distribution(&[f(0), f(0), f(1)]).unwrap();
        assert!((e.mass(&f(0)) - 2.0 / 3.0).abs() < 1e-15);
        assert!((e.mass(&f(1)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(empirical_distribution(&[f(3)]).unwrap(), unif(&[3]));
        let u = empirical_distribution(&[f(0), f(1), f(2), f(3)]).unwrap();
        assert!(u.is_uniform() && u.len() == 4);
        assert!(matches!(empirical_distribution(&[]), Err(Error::EmptySample)));
    }

    #[test]
    fn sampling_examples() {
        let mut rng = RandomSource::new(11, 0);
        assert!(unif(&[1, 2]).sample_iid(0, &mut rng).is_empty());
        assert_eq!(unif(&[5]).sample_iid(5, &mut rng), vec![f(5); 5]);
        let s = unif(&[0, 1]).sample_iid(1_000_000, &mut rng);
        let ones = s.iter().filter(|x| **x == f(1)).count() as f64 / 1e6;
        assert!((ones - 0.5).abs() < 0.002, "{ones}");
    }

    #[test]
    fn weighted_sampling_frequencies() {
        let d = DiscreteDistribution::new(vec![(f(0), 0.1), (f(1), 0.9)]).unwrap();
        let mut rng = RandomSource::new(3, 1);
        let s = d.sample_iid(200_000, &mut rng);
        let zeros = s.iter().filter(|x| **x == f(0)).count() as f64 / 2e5;
        assert!((zeros - 0.1).abs() < 0.003, "{zeros}");
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_no_duplicates(1, 17), 1.0);
        assert_eq!(gamma_no_duplicates(0, 1), 1.0);
        assert_eq!(gamma_no_duplicates(2, 4), 0.75);
        assert!((gamma_no_duplicates(3, 9) - 504.0 / 729.0).abs() < 1e-15);
        assert_eq!(gamma_no_duplicates(5, 4), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let d = DiscreteDistribution::new(vec![(f(0), 0.25), (DomainPoint::row(2, 1).unwrap(), 0.75)]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"support":[[0,0.25],[[2,1],0.75]]}"#);
        assert_eq!(serde_json::from_str::<DiscreteDistribution>(&s).unwrap(), d);
        assert!(serde_json::from_str::<DiscreteDistribution>(r#"{"support":[[0,0.5]]}"#).is_err());
    }
}
