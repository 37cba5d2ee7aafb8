//! The row class `H(n)`: exactly `M` minority labels inside row `n`, 0 elsewhere.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::distribution::DiscreteDistribution;
use crate::domain::{DomainPoint, LabeledExample, Labeling};
use crate::error::{Error, Result};
use crate::hypothesis::{collapse_labeled, Hypothesis, HypothesisClass, RowHypothesis};

/// Enumeration is refused beyond this many members.
pub const ROW_ENUMERATION_CAP: u64 = 1 << 20;

/// `M(n) = ceil(n^(1-beta))`, `m(n) = floor(n^(1/2 + 3 beta))`, `xi = M/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowSchedule {
    pub n: u32,
    pub big_m: u32,
    pub m_gate: u64,
    pub xi: f64,
}

impl RowSchedule {
    pub fn asymptotic(n: u32, beta: f64) -> Self {
        let nf = f64::from(n);
        let big_m = nf.powf(1.0 - beta).ceil() as u32;
        let m_gate = nf.powf(0.5 + 3.0 * beta).floor() as u64;
        Self { n, big_m, m_gate, xi: f64::from(big_m) / nf }
    }
}

#[derive(Clone, Debug)]
pub struct RowClass {
    n: u32,
    big_m: u32,
}

pub fn build_row_class(n: u32, big_m: u32) -> Result<RowClass> {
    RowClass::new(n, big_m)
}

#[derive(Clone, Copy)]
struct Counts {
    zeros: u32,
    ones: u32,
}

impl RowClass {
    pub fn new(n: u32, big_m: u32) -> Result<Self> {
        if big_m == 0 || big_m > n {
            return Err(Error::InvalidParameter(format!("need 1 <= M <= n, got M={big_m}, n={n}")));
        }
        Ok(Self { n, big_m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn big_m(&self) -> u32 {
        self.big_m
    }

    pub fn xi(&self) -> f64 {
        f64::from(self.big_m) / f64::from(self.n)
    }

    /// `M > n/2` swaps the roles of minority and majority.
    pub fn degenerate(&self) -> bool {
        2 * self.big_m > self.n
    }

    pub fn row_points(&self) -> Vec<DomainPoint> {
        (1..=self.n).map(|c| DomainPoint::row(self.n, c).expect("in range")).collect()
    }

    /// `D(n)`: uniform on the row.
    pub fn distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::uniform(self.row_points()).expect("row is nonempty")
    }

    pub fn in_row(&self, x: &DomainPoint) -> bool {
        x.tag().is_none() && matches!(x.as_row(), Some((r, _)) if r == self.n)
    }

    pub fn hypothesis(&self, minority: bool, cols: impl IntoIterator<Item = u32>) -> Result<Hypothesis> {
        let cols: BTreeSet<u32> = cols.into_iter().collect();
        if cols.len() != self.big_m as usize || cols.iter().any(|&c| c == 0 || c > self.n) {
            return Err(Error::InvalidParameter(format!("need {} distinct columns in [1, {}]", self.big_m, self.n)));
        }
        Ok(Hypothesis::Row(RowHypothesis { n: self.n, minority, cols: Arc::new(cols) }))
    }

    /// Minority label `minority` on columns `1..=M`.
    pub fn canonical(&self, minority: bool) -> Hypothesis {
        self.hypothesis(minority, 1..=self.big_m).expect("valid columns")
    }

    /// `|H(n)|` as a set of functions.
    pub fn count(&self) -> u128 {
        let c = binomial(u64::from(self.n), u64::from(self.big_m));
        if 2 * self.big_m == self.n {
            c
        } else {
            2 * c
        }
    }

    fn feasible(&self, c: Counts) -> bool {
        let (m, rest) = (self.big_m, self.n - self.big_m);
        (c.ones <= m && c.zeros <= rest) || (c.zeros <= m && c.ones <= rest)
    }

    fn counts<'a>(&self, t: impl Iterator<Item = (&'a DomainPoint, bool)>) -> Option<Counts> {
        let mut c = Counts { zeros: 0, ones: 0 };
        for (x, y) in t {
            if self.in_row(x) {
                if y {
                    c.ones += 1
                } else {
                    c.zeros += 1
                }
            } else if y || x.tag().is_some() {
                return None;
            }
        }
        Some(c)
    }

    fn collapsed_counts(&self, t: &[LabeledExample]) -> Option<(BTreeMap<DomainPoint, bool>, Counts)> {
        let m = collapse_labeled(t)?;
        let c = self.counts(m.iter().map(|(x, y)| (x, *y)))?;
        Some((m, c))
    }

    /// Consistent member with minority label `b` maximizing `L(h, D_truth)`.
    pub fn worst_with_minority(
        &self,
        t: &[LabeledExample],
        truth: &dyn Labeling,
        d: &DiscreteDistribution,
        b: bool,
    ) -> Result<Option<(Hypothesis, f64)>> {
        let Some((fixed, c)) = self.collapsed_counts(t) else { return Ok(None) };
        let (kb, kother) = if b { (c.ones, c.zeros) } else { (c.zeros, c.ones) };
        if kb > self.big_m || kother > self.n - self.big_m {
            return Ok(None);
        }
        let mut loss = 0.0;
        // Off-row support: every member says 0.
        for &(x, w) in d.support() {
            if !self.in_row(&x) && truth.label_of(&x)? {
                loss += w;
            }
        }
        let mut cols: Vec<u32> = Vec::with_capacity(self.big_m as usize);
        let mut free: Vec<(f64, u32)> = Vec::new();
        for col in 1..=self.n {
            let x = DomainPoint::row(self.n, col).expect("in range");
            let w = d.mass(&x);
            let truth_here = if w > 0.0 { truth.label_of(&x)? } else { false };
            match fixed.get(&x) {
                Some(&y) => {
                    if y == b {
                        cols.push(col);
                    }
                    if w > 0.0 && y != truth_here {
                        loss += w;
                    }
                }
                None => {
                    let wrong_if_b = if w > 0.0 && b != truth_here { w } else { 0.0 };
                    let wrong_if_not = if w > 0.0 && b == truth_here { w } else { 0.0 };
                    loss += wrong_if_not;
                    free.push((wrong_if_b - wrong_if_not, col));
                }
            }
        }
        let r = (self.big_m - kb) as usize;
        free.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(gain, col) in &free[..r] {
            loss += gain;
            cols.push(col);
        }
        Ok(Some((self.hypothesis(b, cols)?, loss.clamp(0.0, 1.0))))
    }

    /// The adversary used against ERM: a consistent member whose majority label
    /// is the truth's minority label, as wrong as possible off the sample.
    pub fn canonical_worst(
        &self,
        t: &[LabeledExample],
        truth: &RowHypothesis,
        d: &DiscreteDistribution,
    ) -> Result<Option<(Hypothesis, f64)>> {
        let h = Hypothesis::Row(truth.clone());
        self.worst_with_minority(t, &h, d, !truth.minority)
    }
}

impl HypothesisClass for RowClass {
    fn name(&self) -> String {
        format!("row(n={},M={})", self.n, self.big_m)
    }

    fn is_consistent(&self, t: &[LabeledExample]) -> bool {
        self.collapsed_counts(t).is_some_and(|(_, c)| self.feasible(c))
    }

    fn members(&self) -> Option<Vec<Hypothesis>> {
        if self.count() > u128::from(ROW_ENUMERATION_CAP) {
            return None;
        }
        let n = self.n as usize;
        let mut rows: BTreeSet<Vec<bool>> = BTreeSet::new();
        for combo in combinations(n, self.big_m as usize) {
            for b in [false, true] {
                let mut v = vec![!b; n];
                for &i in &combo {
                    v[i] = b;
                }
                rows.insert(v);
            }
        }
        Some(rows.into_iter().map(|v| self.from_behavior(&v)).collect())
    }

    fn first_consistent(&self, t: &[LabeledExample]) -> Result<Option<Hypothesis>> {
        let Some((fixed, mut c)) = self.collapsed_counts(t) else { return Ok(None) };
        if !self.feasible(c) {
            return Ok(None);
        }
        let mut v = Vec::with_capacity(self.n as usize);
        for col in 1..=self.n {
            let x = DomainPoint::row(self.n, col).expect("in range");
            let y = match fixed.get(&x) {
                Some(&y) => y,
                None => {
                    let zero = self.feasible(Counts { zeros: c.zeros + 1, ..c });
                    if zero {
                        c.zeros += 1
                    } else {
                        c.ones += 1
                    }
                    !zero
                }
            };
            v.push(y);
        }
        Ok(Some(self.from_behavior(&v)))
    }

    fn worst_consistent(
        &self,
        t: &[LabeledExample],
        truth: &dyn Labeling,
        d: &DiscreteDistribution,
    ) -> Result<Option<(Hypothesis, f64)>> {
        let a = self.worst_with_minority(t, truth, d, false)?;
        let b = self.worst_with_minority(t, truth, d, true)?;
        Ok(match (a, b) {
            (Some(a), Some(b)) => Some(if b.1 > a.1 { b } else { a }),
            (a, b) => a.or(b),
        })
    }

    fn shattering_oracle(&self, points: &[DomainPoint]) -> Option<bool> {
        let mut distinct: Vec<_> = points.to_vec();
        distinct.sort();
        distinct.dedup();
        Some(self.shatters(distinct.iter()))
    }

    fn extension_labels(&self, t: &BTreeMap<DomainPoint, bool>, x: &DomainPoint) -> (bool, bool) {
        let Some(c) = self.counts(t.iter().map(|(p, y)| (p, *y))) else { return (false, false) };
        if !self.in_row(x) {
            return (x.tag().is_none() && self.feasible(c), false);
        }
        (
            self.feasible(Counts { zeros: c.zeros + 1, ..c }),
            self.feasible(Counts { ones: c.ones + 1, ..c }),
        )
    }

    fn shattering_oracle_extended(&self, t: &BTreeMap<DomainPoint, bool>, x: &DomainPoint) -> Option<bool> {
        Some(self.shatters(t.keys().chain(std::iter::once(x))))
    }
}

impl RowClass {
    // Distinct points are shattered iff all lie in the row and every count of
    // ones is feasible.
    fn shatters<'a>(&self, pts: impl Iterator<Item = &'a DomainPoint>) -> bool {
        let mut k = 0u32;
        for p in pts {
            if !self.in_row(p) {
                return false;
            }
            k += 1;
        }
        (0..=k).all(|j| self.feasible(Counts { ones: j, zeros: k - j }))
    }

    fn from_behavior(&self, v: &[bool]) -> Hypothesis {
        let ones = v.iter().filter(|&&b| b).count() as u32;
        let minority = ones == self.big_m;
        let cols = v.iter().enumerate().filter(|(_, &b)| b == minority).map(|(i, _)| i as u32 + 1);
        self.hypothesis(minority, cols).expect("behavior has M minority labels")
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
