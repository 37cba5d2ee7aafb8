//! Collision-based uniformity testing.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::domain::DomainPoint;
use crate::error::{Error, Result};

/// The finite set `Y` a tester compares against.
#[derive(Clone, Debug, PartialEq)]
pub enum PointSet {
    /// Row points `(n, 1..=n)`.
    Row(u32),
    Points(Arc<BTreeSet<DomainPoint>>),
}

impl PointSet {
    pub fn from_points(points: impl IntoIterator<Item = DomainPoint>) -> Self {
        PointSet::Points(Arc::new(points.into_iter().collect()))
    }

    pub fn len(&self) -> usize {
        match self {
            PointSet::Row(n) => *n as usize,
            PointSet::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: &DomainPoint) -> bool {
        match self {
            PointSet::Row(n) => x.tag().is_none() && matches!(x.as_row(), Some((r, _)) if r == *n),
            PointSet::Points(p) => p.contains(x),
        }
    }

    pub fn uniform(&self) -> Result<DiscreteDistribution> {
        match self {
            PointSet::Row(n) => DiscreteDistribution::uniform((1..=*n).map(|c| DomainPoint::row(*n, c)).collect::<Result<_>>()?),
            PointSet::Points(p) => DiscreteDistribution::uniform(p.iter().copied().collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterParams {
    pub xi: f64,
    pub delta: f64,
}

impl TesterParams {
    pub fn new(xi: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("xi", xi), ("delta", delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} not in (0,1)")));
            }
        }
        Ok(TesterParams { xi, delta })
    }

    /// Number of blocks `ℓ = ⌈18 ln(2/δ)⌉`.
    pub fn blocks(&self) -> usize {
        (18.0 * (2.0 / self.delta).ln()).ceil() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterOutcome {
    pub accepted: bool,
    pub sub_decisions: Vec<bool>,
    pub statistics: Vec<f64>,
}

impl TesterOutcome {
    fn rejected_outright() -> Self {
        TesterOutcome { accepted: false, sub_decisions: Vec::new(), statistics: Vec::new() }
    }
}

/// Fraction of index pairs `j < k` with `x_j = x_k`.
pub fn collision_statistic(block: &[DomainPoint]) -> Result<f64> {
    let m = block.len();
    if m < 2 {
        return Err(Error::BlockTooSmall(m));
    }
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    let mut pairs = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            pairs += run * (run - 1) / 2;
            run = 1;
        }
    }
    pairs += run * (run - 1) / 2;
    let total = (m as u64) * (m as u64 - 1) / 2;
    Ok(pairs as f64 / total as f64)
}

/// Per-block acceptance threshold `(1 + 2ξ²)/|Y|`.
pub fn threshold(y_len: usize, xi: f64) -> f64 {
    (1.0 + 2.0 * xi * xi) / y_len as f64
}

pub fn test_unif(y: &PointSet, params: &TesterParams, s: &[DomainPoint]) -> Result<TesterOutcome> {
    test_unif_with_threshold(params.blocks(), threshold(y.len(), params.xi), s)
}

/// Block-and-vote core with an explicit threshold.
pub fn test_unif_with_threshold(blocks: usize, tr: f64, s: &[DomainPoint]) -> Result<TesterOutcome> {
    let block = s.len() / blocks.max(1);
    if blocks == 0 || block < 2 {
        return Err(Error::SampleTooSmall { size: s.len(), blocks, block });
    }
    let statistics = s[..block * blocks]
        .par_chunks(block)
        .map(collision_statistic)
        .collect::<Result<Vec<_>>>()?;
    let sub_decisions: Vec<bool> = statistics.iter().map(|&z| z < tr).collect();
    let acc = sub_decisions.iter().filter(|&&a| a).count();
    Ok(TesterOutcome { accepted: 2 * acc >= blocks, sub_decisions, statistics })
}

/// Rejects any sample leaving `Y`, otherwise tests at `ξ/2`.
pub fn m_test_unif(y: &PointSet, params: &TesterParams, s: &[DomainPoint]) -> Result<TesterOutcome> {
    if !s.iter().all(|x| y.contains(x)) {
        return Ok(TesterOutcome::rejected_outright());
    }
    test_unif(y, &TesterParams { xi: params.xi / 2.0, delta: params.delta }, s)
}

/// `⌈18·64·√n·ln(2/δ)/ξ²⌉`.
pub fn m_test_sample_bound(n: u64, xi: f64, delta: f64) -> u64 {
    (18.0 * 64.0 * (n as f64).sqrt() * (2.0 / delta).ln() / (xi * xi)).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    fn f(i: u64) -> DomainPoint {
        DomainPoint::flat(i)
    }

    fn naive_collisions(b: &[DomainPoint]) -> f64 {
        let mut c = 0;
        let mut t = 0;
        for j in 0..b.len() {
            for k in j + 1..b.len() {
                t += 1;
                c += (b[j] == b[k]) as usize;
            }
        }
        c as f64 / t as f64
    }

    #[test]
    fn collision_examples() {
        assert!((collision_statistic(&[f(1), f(1), f(2)]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(collision_statistic(&[f(1), f(2), f(3)]).unwrap(), 0.0);
        assert_eq!(collision_statistic(&[f(4); 4]).unwrap(), 1.0);
        assert!(matches!(collision_statistic(&[f(1)]), Err(Error::BlockTooSmall(1))));
        let mut r = RandomSource::new(3, 0);
        let d = DiscreteDistribution::uniform((0..7).map(f).collect()).unwrap();
        for len in 2..40 {
            let b = d.sample_iid(len, &mut r);
            assert!((collision_statistic(&b).unwrap() - naive_collisions(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_and_bound() {
        assert_eq!(threshold(4, 0.5), 0.375);
        assert_eq!(m_test_sample_bound(100, 0.1, 0.1), 3_451_084);
        let base = m_test_sample_bound(10_000, 0.2, 0.05) as f64;
        assert!((m_test_sample_bound(40_000, 0.2, 0.05) as f64 / base - 2.0).abs() < 1e-5);
        assert!((m_test_sample_bound(10_000, 0.1, 0.05) as f64 / base - 4.0).abs() < 1e-5);
        assert_eq!(TesterParams::new(0.1, 0.1).unwrap().blocks(), 54);
        assert!(TesterParams::new(0.0, 0.5).is_err());
        assert!(TesterParams::new(0.5, 1.0).is_err());
    }

    #[test]
    fn too_small_is_an_error() {
        let y = PointSet::Row(10);
        let p = TesterParams::new(0.3, 0.2).unwrap();
        let s: Vec<_> = (0..2 * p.blocks() - 1).map(|i| DomainPoint::row(10, 1 + (i % 10) as u32).unwrap()).collect();
        assert!(matches!(test_unif(&y, &p, &s), Err(Error::SampleTooSmall { .. })));
        assert!(matches!(m_test_unif(&y, &p, &s), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn off_set_point_rejects() {
        let y = PointSet::Row(10);
        let p = TesterParams::new(0.3, 0.2).unwrap();
        let mut s: Vec<_> = (0..1000).map(|i| DomainPoint::row(10, 1 + (i % 10) as u32).unwrap()).collect();
        s.push(DomainPoint::row(9, 1).unwrap());
        assert!(!m_test_unif(&y, &p, &s).unwrap().accepted);
        s.pop();
        s.push(DomainPoint::row(10, 1).unwrap().with_tag(0));
        assert!(!m_test_unif(&y, &p, &s).unwrap().accepted);
    }

    #[test]
    fn uniform_accepts_point_mass_rejects() {
        let y = PointSet::Row(20);
        let p = TesterParams::new(0.5, 0.2).unwrap();
        let size = m_test_sample_bound(20, 0.25, 0.2) as usize;
        let u = y.uniform().unwrap();
        let mut r = RandomSource::new(9, 0);
        for _ in 0..5 {
            let s = u.sample_iid(size, &mut r);
            assert!(m_test_unif(&y, &p, &s).unwrap().accepted);
        }
        let pm = vec![DomainPoint::row(20, 3).unwrap(); size];
        let out = m_test_unif(&y, &p, &pm).unwrap();
        assert!(!out.accepted);
        assert!(out.statistics.iter().all(|&z| z == 1.0));
    }

    #[test]
    fn aggregation_rule() {
        // Two blocks, one accepting: 2·1 >= 2 accepts.
        let s = [f(1), f(2), f(3), f(3)];
        let out = test_unif_with_threshold(2, 0.5, &s).unwrap();
        assert_eq!(out.sub_decisions, vec![true, false]);
        assert!(out.accepted);
        let out = test_unif_with_threshold(3, 0.5, &[f(1), f(2), f(3), f(3), f(4), f(4), f(9)]).unwrap();
        assert_eq!(out.sub_decisions, vec![true, false, false]);
        assert!(!out.accepted);
    }

    #[test]
    fn point_set_membership() {
        let y = PointSet::from_points([f(1), f(5)]);
        assert_eq!(y.len(), 2);
        assert!(y.contains(&f(5)) && !y.contains(&f(2)));
        assert!(PointSet::Row(4).contains(&DomainPoint::row(4, 4).unwrap()));
        assert_eq!(PointSet::Row(4).uniform().unwrap().len(), 4);
    }
}
