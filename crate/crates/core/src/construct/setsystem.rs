//! Random set systems with small pairwise intersections and their random labelings.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::domain::{DomainPoint, LabeledExample};
use crate::error::{Error, Result};
use crate::hypothesis::{project_members, Hypothesis, HypothesisClass};
use crate::rng::RandomSource;

pub const DEFAULT_RETRY_CAP: usize = 50;

/// `k` subsets of size `n` of the universe `{0, ..., U-1}` (flat points).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub universe: u64,
    pub n: usize,
    /// Sorted element indices per set.
    pub sets: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystemThresholds {
    /// Largest allowed `|S ∩ S'|`.
    pub intersection: usize,
    /// Largest `|T|` probed for containment.
    pub container_size: usize,
    /// Each probed `T` must lie in at least this many sets.
    pub container_count: usize,
    /// Budget of probed `T` per size; exhaustive when the count fits.
    pub container_samples: usize,
}

impl SetSystemThresholds {
    pub fn intersection_only(intersection: usize) -> Self {
        Self { intersection, container_size: 0, container_count: 0, container_samples: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSystemReport {
    pub sizes_ok: bool,
    pub max_intersection: usize,
    pub intersection_ok: bool,
    pub min_container_count: usize,
    pub containers_ok: bool,
    /// Fraction of all `T` with `|T| <= container_size` actually probed.
    pub container_coverage: f64,
    pub ok: bool,
    pub violation: Option<String>,
}

impl SetSystem {
    pub fn points(&self, i: usize) -> Vec<DomainPoint> {
        self.sets[i].iter().map(|&u| DomainPoint::flat(u)).collect()
    }

    pub fn uniform_on(&self, i: usize) -> DiscreteDistribution {
        DiscreteDistribution::uniform(self.points(i)).expect("sets are nonempty")
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, i: usize, u: u64) -> bool {
        self.sets[i].binary_search(&u).is_ok()
    }

    pub fn max_intersection(&self) -> usize {
        let mut best = 0;
        for i in 0..self.sets.len() {
            for j in i + 1..self.sets.len() {
                best = best.max(intersection_size(&self.sets[i], &self.sets[j]));
            }
        }
        best
    }
}

fn intersection_size(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Draw `k` uniform `n`-subsets, redrawing on a fresh stream until the
/// system verifies, at most `retries` times.
pub fn sample_set_system(
    universe: u64,
    n: usize,
    k: usize,
    thresholds: &SetSystemThresholds,
    retries: usize,
    rng: &RandomSource,
) -> Result<(SetSystem, SetSystemReport)> {
    if n as u64 > universe || n == 0 {
        return Err(Error::InvalidParameter(format!("need 1 <= n <= U, got n={n}, U={universe}")));
    }
    let mut last = String::new();
    for attempt in 0..retries.max(1) {
        let mut r = rng.fork(attempt as u64);
        let sets = (0..k)
            .map(|_| {
                let mut s: Vec<u64> = sample(&mut r, universe as usize, n).into_iter().map(|i| i as u64).collect();
                s.sort_unstable();
                s
            })
            .collect();
        let system = SetSystem { universe, n, sets };
        let report = verify_set_system(&system, thresholds, &mut r);
        if report.ok {
            return Ok((system, report));
        }
        last = report.violation.unwrap_or_default();
    }
    Err(Error::RetryCapExceeded { retries, reason: last })
}

/// Check set sizes, pairwise intersections (exact) and containment counts
/// for small `T` (sampled unless exhaustive enumeration fits the budget).
pub fn verify_set_system(
    system: &SetSystem,
    thresholds: &SetSystemThresholds,
    rng: &mut RandomSource,
) -> SetSystemReport {
    let sizes_ok = system.sets.iter().all(|s| s.len() == system.n);
    let max_intersection = system.max_intersection();
    let intersection_ok = max_intersection <= thresholds.intersection;
    let (min_container_count, container_coverage) = container_counts(system, thresholds, rng);
    let containers_ok = min_container_count >= thresholds.container_count;
    let violation = if !sizes_ok {
        Some("set size differs from n".to_string())
    } else if !intersection_ok {
        Some(format!("intersection {max_intersection} exceeds {}", thresholds.intersection))
    } else if !containers_ok {
        Some(format!("some T lies in only {min_container_count} sets (< {})", thresholds.container_count))
    } else {
        None
    };
    SetSystemReport {
        sizes_ok,
        max_intersection,
        intersection_ok,
        min_container_count,
        containers_ok,
        container_coverage,
        ok: violation.is_none(),
        violation,
    }
}

fn containing(system: &SetSystem, t: &[u64]) -> usize {
    (0..system.len()).filter(|&i| t.iter().all(|&u| system.contains(i, u))).count()
}

fn container_counts(system: &SetSystem, th: &SetSystemThresholds, rng: &mut RandomSource) -> (usize, f64) {
    let mut min = system.len();
    let mut probed = 0f64;
    let mut total = 0f64;
    for size in 1..=th.container_size {
        let all = crate::construct::binomial(system.universe, size as u64) as f64;
        total += all;
        if all <= th.container_samples as f64 {
            for t in crate::construct::combinations(system.universe as usize, size) {
                let t: Vec<u64> = t.into_iter().map(|i| i as u64).collect();
                min = min.min(containing(system, &t));
            }
            probed += all;
        } else {
            for _ in 0..th.container_samples {
                let t: Vec<u64> = sample(rng, system.universe as usize, size).into_iter().map(|i| i as u64).collect();
                min = min.min(containing(system, &t));
            }
            probed += th.container_samples as f64;
        }
    }
    // T = {} lies in every set.
    total += 1.0;
    probed += 1.0;
    (min, probed / total)
}

/// Each set `S` carries fair-coin labels on `S` and label 1 elsewhere.
#[derive(Clone, Debug)]
pub struct SetSystemClass {
    system: SetSystem,
    labels: Vec<Vec<bool>>,
    members: Vec<Hypothesis>,
}

pub fn sample_labelings(system: &SetSystem, rng: &mut RandomSource) -> SetSystemClass {
    let labels: Vec<Vec<bool>> = system.sets.iter().map(|s| s.iter().map(|_| rng.random_bool(0.5)).collect()).collect();
    SetSystemClass::new(system.clone(), labels).expect("labels match set sizes")
}

impl SetSystemClass {
    pub fn new(system: SetSystem, labels: Vec<Vec<bool>>) -> Result<Self> {
        if labels.len() != system.sets.len() || labels.iter().zip(&system.sets).any(|(l, s)| l.len() != s.len()) {
            return Err(Error::InvalidParameter("labels do not match the set system".into()));
        }
        let members = system
            .sets
            .iter()
            .zip(&labels)
            .map(|(s, l)| Hypothesis::table(s.iter().map(|&u| DomainPoint::flat(u)).zip(l.iter().copied()), Some(true)))
            .collect();
        Ok(Self { system, labels, members })
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn labels(&self) -> &[Vec<bool>] {
        &self.labels
    }

    pub fn hypothesis(&self, i: usize) -> &Hypothesis {
        &self.members[i]
    }
}

impl HypothesisClass for SetSystemClass {
    fn name(&self) -> String {
        format!("set-system(U={},n={},k={})", self.system.universe, self.system.n, self.system.len())
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

    /// Exact by counting member behaviors; cheap since `k` is small.
    fn shattering_oracle(&self, points: &[DomainPoint]) -> Option<bool> {
        let need = 1usize.checked_shl(points.len() as u32)?;
        if need > self.members.len() {
            return Some(false);
        }
        project_members(&self.members, points, need).ok().map(|b| b.len() == need)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub probes: usize,
    pub worst_relative_deviation: f64,
    pub balanced: bool,
    /// `(T, |S_T|, counts per labeling)` for each probe.
    pub details: Vec<(Vec<u64>, usize, Vec<usize>)>,
}

/// For `sample_count` random `T` with `|T| <= max_size`, count the containers
/// realizing each labeling of `T` and compare with `|S_T| / 2^|T|`.
pub fn verify_balanced_containers(
    class: &SetSystemClass,
    max_size: usize,
    sample_count: usize,
    tolerance: f64,
    rng: &mut RandomSource,
) -> BalanceReport {
    let sys = &class.system;
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    for probe in 0..sample_count {
        let size = if max_size == 0 { 0 } else { probe % (max_size + 1) };
        let mut t: Vec<u64> = sample(rng, sys.universe as usize, size).into_iter().map(|i| i as u64).collect();
        t.sort_unstable();
        let (count, tally) = labeling_counts(class, &t);
        if count > 0 {
            let expect = count as f64 / (1u64 << t.len()) as f64;
            for &c in &tally {
                worst = worst.max((c as f64 - expect).abs() / expect);
            }
        }
        details.push((t, count, tally));
    }
    BalanceReport { probes: sample_count, worst_relative_deviation: worst, balanced: worst <= tolerance, details }
}

/// Containers of `t` and how many realize each labeling (bit `j` = label of `t[j]`).
pub fn labeling_counts(class: &SetSystemClass, t: &[u64]) -> (usize, Vec<usize>) {
    let sys = &class.system;
    let mut tally = vec![0usize; 1 << t.len()];
    let mut count = 0;
    for i in 0..sys.len() {
        if t.iter().all(|&u| sys.contains(i, u)) {
            count += 1;
            let mut code = 0;
            for (j, &u) in t.iter().enumerate() {
                let pos = sys.sets[i].binary_search(&u).expect("contained");
                if class.labels[i][pos] {
                    code |= 1 << j;
                }
            }
            tally[code] += 1;
        }
    }
    (count, tally)
}

/// Uniform distribution on each set, with separation constant
/// `c = max |S ∩ S'| / n`.
pub fn wellsep_family_from_setsystem(system: &SetSystem) -> Result<(Vec<DiscreteDistribution>, f64)> {
    let c = system.max_intersection() as f64 / system.n as f64;
    if c >= 1.0 {
        return Err(Error::SeparationViolation("two sets coincide".into()));
    }
    Ok(((0..system.len()).map(|i| system.uniform_on(i)).collect(), c))
}

/// `max over ordered pairs i != j of D_j[supp(D_i)]`.
pub fn separation_constant(family: &[DiscreteDistribution]) -> f64 {
    let mut c: f64 = 0.0;
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if i != j {
                c = c.max(b.mass_of(a.points().collect::<Vec<_>>().iter()));
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_set_is_valid() {
        let r = RandomSource::new(1, 0);
        let (s, rep) = sample_set_system(20, 5, 1, &SetSystemThresholds::intersection_only(0), 5, &r).unwrap();
        assert_eq!(s.len(), 1);
        assert!(rep.ok);
    }

    #[test]
    fn recorded_seed_passes() {
        let r = RandomSource::new(2024, 0);
        let (s, rep) = sample_set_system(256, 16, 8, &SetSystemThresholds::intersection_only(8), 50, &r).unwrap();
        assert!(rep.max_intersection <= 8);
        assert!(s.sets.iter().all(|x| x.len() == 16));
    }

    #[test]
    fn forced_failure_hits_retry_cap() {
        let r = RandomSource::new(1, 0);
        let e = sample_set_system(4, 4, 2, &SetSystemThresholds::intersection_only(3), 5, &r).unwrap_err();
        assert!(matches!(e, Error::RetryCapExceeded { retries: 5, .. }));
    }

    #[test]
    fn verify_examples() {
        let mut r = RandomSource::new(0, 0);
        let disjoint = SetSystem { universe: 4, n: 2, sets: vec![vec![0, 1], vec![2, 3]] };
        assert!(verify_set_system(&disjoint, &SetSystemThresholds::intersection_only(1), &mut r).ok);
        let dup = SetSystem { universe: 4, n: 2, sets: vec![vec![0, 1], vec![0, 1]] };
        let rep = verify_set_system(&dup, &SetSystemThresholds::intersection_only(1), &mut r);
        assert!(!rep.ok && rep.max_intersection == 2);
        // Empty T is in every set.
        let th = SetSystemThresholds { intersection: 2, container_size: 0, container_count: 2, container_samples: 1 };
        let rep = verify_set_system(&dup, &th, &mut r);
        assert_eq!(rep.min_container_count, 2);
        assert_eq!(rep.container_coverage, 1.0);
        // Exhaustive probing of singletons.
        let th = SetSystemThresholds { intersection: 2, container_size: 1, container_count: 1, container_samples: 100 };
        let rep = verify_set_system(&disjoint, &th, &mut r);
        assert!(rep.ok && rep.container_coverage == 1.0 && rep.min_container_count == 1);
    }

    #[test]
    fn labelings_are_one_off_set() {
        let r = RandomSource::new(5, 0);
        let (s, _) = sample_set_system(64, 16, 4, &SetSystemThresholds::intersection_only(16), 3, &r).unwrap();
        let c = sample_labelings(&s, &mut RandomSource::new(5, 1));
        for i in 0..s.len() {
            for u in 0..64 {
                if !s.contains(i, u) {
                    assert_eq!(c.hypothesis(i).label(&DomainPoint::flat(u)), Some(true));
                }
            }
        }
    }

    #[test]
    fn on_set_ones_near_half() {
        let r = RandomSource::new(9, 0);
        let (s, _) = sample_set_system(4096, 1024, 8, &SetSystemThresholds::intersection_only(1024), 1, &r).unwrap();
        let c = sample_labelings(&s, &mut RandomSource::new(9, 1));
        let ones: usize = c.labels().iter().flatten().filter(|&&b| b).count();
        let total = 8.0 * 1024.0;
        // Binomial sd is sqrt(total)/2 = 45; allow 4 sd.
        assert!((ones as f64 - total / 2.0).abs() < 4.0 * total.sqrt() / 2.0, "{ones}");
    }

    #[test]
    fn balance_examples() {
        let r = RandomSource::new(3, 0);
        let (s, _) = sample_set_system(32, 16, 32, &SetSystemThresholds::intersection_only(16), 1, &r).unwrap();
        let c = sample_labelings(&s, &mut RandomSource::new(3, 1));
        let rep = verify_balanced_containers(&c, 0, 1, 0.0, &mut RandomSource::new(3, 2));
        assert_eq!(rep.details[0].1, 32);
        assert_eq!(rep.details[0].2, vec![32]);
        let one = SetSystem { universe: 4, n: 2, sets: vec![vec![0, 1]] };
        let c1 = SetSystemClass::new(one, vec![vec![true, false]]).unwrap();
        let (count, tally) = labeling_counts(&c1, &[0]);
        assert_eq!((count, tally), (1, vec![0, 1]));
        assert!(!verify_balanced_containers(&c1, 1, 8, 0.5, &mut RandomSource::new(1, 1)).balanced);
    }

    #[test]
    fn wellsep_constants() {
        let disjoint = SetSystem { universe: 4, n: 2, sets: vec![vec![0, 1], vec![2, 3]] };
        let (fam, c) = wellsep_family_from_setsystem(&disjoint).unwrap();
        assert_eq!(c, 0.0);
        assert_eq!(separation_constant(&fam), 0.0);
        let half = SetSystem { universe: 24, n: 16, sets: vec![(0..16).collect(), (8..24).collect()] };
        let (fam, c) = wellsep_family_from_setsystem(&half).unwrap();
        assert_eq!(c, 0.5);
        assert_eq!(separation_constant(&fam), 0.5);
        let dup = SetSystem { universe: 4, n: 2, sets: vec![vec![0, 1], vec![0, 1]] };
        assert!(matches!(wellsep_family_from_setsystem(&dup), Err(Error::SeparationViolation(_))));
    }

    #[test]
    fn shattering_oracle_counts_behaviors() {
        let system = SetSystem { universe: 4, n: 2, sets: vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1]] };
        let labels = vec![vec![false, false], vec![false, true], vec![true, false], vec![true, true]];
        let class = SetSystemClass::new(system, labels).unwrap();
        let (a, b, c) = (DomainPoint::flat(0), DomainPoint::flat(1), DomainPoint::flat(2));
        assert_eq!(class.shattering_oracle(&[a, b]), Some(true));
        assert_eq!(class.shattering_oracle(&[a]), Some(true));
        // Point 2 lies in no set, so every member labels it 0.
        assert_eq!(class.shattering_oracle(&[a, c]), Some(false));
        assert_eq!(class.shattering_oracle(&[a, b, c]), Some(false));
    }
}
