use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{lp_solve, LEARNER_ENUMERATION_CAP, NASH_TOLERANCE};
use crate::distribution::{empirical_distribution, DiscreteDistribution};
use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::hypothesis::{bits_to_string, parse_bits, Hypothesis};
use microlp::{ComparisonOp, OptimizationDirection, Problem};

pub const DOMAIN_CAP: usize = 4;
pub const CLASS_CAP: usize = 16;
pub const SAMPLE_CAP: usize = 4;
pub const SEQUENCE_CAP: usize = 4096;

/// A finite learning game: the adversary picks `h` from `class`, the
/// learner sees `m` labeled draws from `D` and predicts a fresh draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameInstanceRepr", into = "GameInstanceRepr")]
pub struct GameInstance {
    domain: Vec<DomainPoint>,
    class: Vec<Vec<bool>>,
    distribution: DiscreteDistribution,
    m: usize,
}

#[derive(Clone, Serialize, Deserialize)]
struct GameInstanceRepr {
    domain: Vec<DomainPoint>,
    class: Vec<String>,
    distribution: DiscreteDistribution,
    m: usize,
}

impl TryFrom<GameInstanceRepr> for GameInstance {
    type Error = Error;

    fn try_from(r: GameInstanceRepr) -> Result<Self> {
        let class = r.class.iter().map(|s| parse_bits(s)).collect::<Result<_>>()?;
        GameInstance::new(r.domain, class, r.distribution, r.m)
    }
}

impl From<GameInstance> for GameInstanceRepr {
    fn from(g: GameInstance) -> Self {
        GameInstanceRepr {
            domain: g.domain,
            class: g.class.iter().map(|b| bits_to_string(b)).collect(),
            distribution: g.distribution,
            m: g.m,
        }
    }
}

impl GameInstance {
    /// `class[h][i]` is the label of hypothesis `h` on `domain[i]`.
    pub fn new(domain: Vec<DomainPoint>, class: Vec<Vec<bool>>, distribution: DiscreteDistribution, m: usize) -> Result<Self> {
        if domain.is_empty() || domain.len() > DOMAIN_CAP {
            return Err(Error::CapExceeded(format!("domain size {} not in 1..={DOMAIN_CAP}", domain.len())));
        }
        let mut sorted = domain.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != domain.len() {
            return Err(Error::InvalidParameter("repeated domain point".into()));
        }
        if class.is_empty() || class.len() > CLASS_CAP {
            return Err(Error::CapExceeded(format!("class size {} not in 1..={CLASS_CAP}", class.len())));
        }
        if let Some(h) = class.iter().find(|h| h.len() != domain.len()) {
            return Err(Error::InvalidParameter(format!("hypothesis {} does not match the domain", bits_to_string(h))));
        }
        if let Some(x) = distribution.points().find(|x| !domain.contains(x)) {
            return Err(Error::InvalidParameter(format!("support point {x} outside the domain")));
        }
        if m > SAMPLE_CAP {
            return Err(Error::CapExceeded(format!("m = {m} > {SAMPLE_CAP}")));
        }
        let seqs = (distribution.len() as u128).pow(m as u32);
        if seqs > SEQUENCE_CAP as u128 {
            return Err(Error::CapExceeded(format!("{seqs} sample sequences > {SEQUENCE_CAP}")));
        }
        Ok(Self { domain, class, distribution, m })
    }

    pub fn from_hypotheses(domain: Vec<DomainPoint>, class: &[Hypothesis], d: DiscreteDistribution, m: usize) -> Result<Self> {
        let rows = class
            .iter()
            .map(|h| domain.iter().map(|x| h.label(x).ok_or(Error::UndefinedPoint(*x))).collect())
            .collect::<Result<_>>()?;
        Self::new(domain, rows, d, m)
    }

    pub fn domain(&self) -> &[DomainPoint] {
        &self.domain
    }

    pub fn class(&self) -> &[Vec<bool>] {
        &self.class
    }

    pub fn distribution(&self) -> &DiscreteDistribution {
        &self.distribution
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn with(&self, d: DiscreteDistribution, m: usize) -> Result<Self> {
        Self::new(self.domain.clone(), self.class.clone(), d, m)
    }
}

/// Flattened payoff structure. A learner strategy is `q[key][x]`, the
/// probability of predicting 1 on support point `x` after observing
/// labeled sample `key`.
struct Game {
    support: usize,
    domain_index: Vec<usize>,
    keys: usize,
    /// Per hypothesis: `(variable, weight, label)` with weight `P(σ)·D(x)`.
    terms: Vec<Vec<(usize, f64, bool)>>,
}

impl Game {
    fn compile(g: &GameInstance) -> Self {
        let supp: Vec<(usize, f64)> = g
            .distribution
            .support()
            .iter()
            .map(|(x, p)| (g.domain.iter().position(|y| y == x).expect("checked"), *p))
            .collect();
        let k = supp.len();
        let mut keys: HashMap<(usize, u64), usize> = HashMap::new();
        let mut terms = vec![Vec::new(); g.class.len()];
        let n_seq = k.pow(g.m as u32);
        for s in 0..n_seq {
            let mut idx = Vec::with_capacity(g.m);
            let mut r = s;
            let mut p = 1.0;
            for _ in 0..g.m {
                idx.push(r % k);
                p *= supp[r % k].1;
                r /= k;
            }
            for (h, row) in g.class.iter().enumerate() {
                let labels = idx.iter().enumerate().fold(0u64, |acc, (i, &j)| acc | (u64::from(row[supp[j].0]) << i));
                let next = keys.len();
                let key = *keys.entry((s, labels)).or_insert(next);
                for (xi, &(d, px)) in supp.iter().enumerate() {
                    terms[h].push((key * k + xi, p * px, row[d]));
                }
            }
        }
        Game { support: k, domain_index: supp.iter().map(|s| s.0).collect(), keys: keys.len(), terms }
    }

    fn vars(&self) -> usize {
        self.keys * self.support
    }

    fn payoff(&self, h: usize, q: &[f64]) -> f64 {
        self.terms[h].iter().map(|&(j, w, y)| if y { w * (1.0 - q[j]) } else { w * q[j] }).sum()
    }

    /// `payoff(h, q) = c_h + Σ_j a_hj q_j`.
    fn affine(&self, h: usize) -> (f64, BTreeMap<usize, f64>) {
        let mut c = 0.0;
        let mut a = BTreeMap::new();
        for &(j, w, y) in &self.terms[h] {
            if y {
                c += w;
                *a.entry(j).or_insert(0.0) -= w;
            } else {
                *a.entry(j).or_insert(0.0) += w;
            }
        }
        (c, a)
    }

    /// Value of the adversary mixture `lambda` against a best-responding learner.
    fn best_row(&self, lambda: &[f64]) -> f64 {
        let mut c = 0.0;
        let mut coef = vec![0.0; self.vars()];
        for (h, &l) in lambda.iter().enumerate() {
            let (ch, a) = self.affine(h);
            c += l * ch;
            for (j, v) in a {
                coef[j] += l * v;
            }
        }
        c + coef.iter().map(|&v| v.min(0.0)).sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    /// Prediction bits, one per (observed sample, support point) in strategy order.
    pub predictions: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    pub value: f64,
    /// Behavioral strategy: probability of predicting 1 per strategy slot.
    pub strategy: Vec<f64>,
    pub learner_mixture: Vec<MixtureComponent>,
    pub adversary_mixture: Vec<f64>,
    /// Worst expected loss of the learner mixture over hypotheses.
    pub learner_worst_column: f64,
    /// Loss the adversary mixture forces on every learner.
    pub adversary_best_row: f64,
}

impl GameSolution {
    pub fn is_nash_certified(&self) -> bool {
        let lm: f64 = self.learner_mixture.iter().map(|c| c.weight).sum();
        let am: f64 = self.adversary_mixture.iter().sum();
        (lm - 1.0).abs() <= 1e-9
            && (am - 1.0).abs() <= 1e-9
            && self.learner_worst_column <= self.value + NASH_TOLERANCE
            && self.adversary_best_row >= self.value - NASH_TOLERANCE
    }
}

/// Split a behavioral strategy into deterministic threshold strategies:
/// for `θ` uniform on `(0, 1]`, predict 1 iff `q ≥ θ`.
fn threshold_mixture(q: &[f64]) -> Vec<(f64, Vec<bool>)> {
    let mut cuts: Vec<f64> = q.iter().copied().chain([0.0, 1.0]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    cuts.windows(2)
        .map(|w| (w[1] - w[0], q.iter().map(|&v| v >= w[1] - 1e-12).collect()))
        .filter(|(wt, _)| *wt > 0.0)
        .collect()
}

/// `ε*(D, m)`: min over randomized learners of max over `h` of the expected
/// loss, solved exactly as a linear program over behavioral strategies.
pub fn optimal_fixed_error(g: &GameInstance) -> Result<GameSolution> {
    let game = Game::compile(g);
    let nv = game.vars();
    let affine: Vec<_> = (0..g.class.len()).map(|h| game.affine(h)).collect();

    let mut p = Problem::new(OptimizationDirection::Minimize);
    let q: Vec<_> = (0..nv).map(|_| p.add_var(0.0, (0.0, 1.0))).collect();
    let t = p.add_var(1.0, (0.0, f64::INFINITY));
    for (c, a) in &affine {
        let mut expr: Vec<_> = a.iter().map(|(&j, &v)| (q[j], v)).collect();
        expr.push((t, -1.0));
        p.add_constraint(expr, ComparisonOp::Le, -c);
    }
    let sol = lp_solve(&p)?;
    let value = sol.objective();
    let strategy: Vec<f64> = q.iter().map(|&v| sol.var_value(v).clamp(0.0, 1.0)).collect();

    let mut dual = Problem::new(OptimizationDirection::Maximize);
    let lambda: Vec<_> = affine.iter().map(|(c, _)| dual.add_var(*c, (0.0, 1.0))).collect();
    let w: Vec<_> = (0..nv).map(|_| dual.add_var(1.0, (f64::NEG_INFINITY, 0.0))).collect();
    let mut by_var: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for (h, (_, a)) in affine.iter().enumerate() {
        for (&j, &v) in a {
            by_var[j].push((h, v));
        }
    }
    for (j, col) in by_var.iter().enumerate() {
        let mut expr = vec![(w[j], 1.0)];
        expr.extend(col.iter().map(|&(h, v)| (lambda[h], -v)));
        dual.add_constraint(expr, ComparisonOp::Le, 0.0);
    }
    dual.add_constraint(lambda.iter().map(|&l| (l, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    let dsol = lp_solve(&dual)?;
    let mut adversary: Vec<f64> = lambda.iter().map(|&l| dsol.var_value(l).max(0.0)).collect();
    let total: f64 = adversary.iter().sum();
    adversary.iter_mut().for_each(|l| *l /= total);

    let mixture = threshold_mixture(&strategy);
    let learner_worst_column = (0..g.class.len())
        .map(|h| {
            mixture
                .iter()
                .map(|(wt, pred)| {
                    let qd: Vec<f64> = pred.iter().map(|&b| f64::from(u8::from(b))).collect();
                    wt * game.payoff(h, &qd)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let adversary_best_row = game.best_row(&adversary);
    let solution = GameSolution {
        value,
        strategy,
        learner_mixture: mixture
            .into_iter()
            .map(|(weight, pred)| MixtureComponent { weight, predictions: bits_to_string(&pred) })
            .collect(),
        adversary_mixture: adversary,
        learner_worst_column,
        adversary_best_row,
    };
    if !solution.is_nash_certified() {
        return Err(Error::Solver(format!(
            "game value {value} not certified: learner {learner_worst_column}, adversary {adversary_best_row}"
        )));
    }
    Ok(solution)
}

/// A deterministic learner with its loss against each hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureLearner {
    /// Predictions per (observed sample, domain point), sample-major.
    pub predictions: Vec<bool>,
    pub payoff: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerEnumeration {
    /// `(2^|domain|)^#observable samples` before deduplication.
    pub raw_count: u64,
    /// One representative per distinct payoff column.
    pub learners: Vec<PureLearner>,
}

pub fn enumerate_deterministic_learners(g: &GameInstance) -> Result<LearnerEnumeration> {
    let game = Game::compile(g);
    let bits = g.domain.len() * game.keys;
    if bits as u32 > LEARNER_ENUMERATION_CAP.trailing_zeros() {
        return Err(Error::CapExceeded(format!("2^{bits} deterministic learners")));
    }
    let raw_count = 1u64 << bits;
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut learners = Vec::new();
    let mut q = vec![0.0; game.vars()];
    for code in 0..raw_count {
        for key in 0..game.keys {
            for (xi, &d) in game.domain_index.iter().enumerate() {
                q[key * game.support + xi] = ((code >> (key * g.domain.len() + d)) & 1) as f64;
            }
        }
        let payoff: Vec<f64> = (0..g.class.len()).map(|h| game.payoff(h, &q)).collect();
        let sig: Vec<i64> = payoff.iter().map(|v| (v * 1e10).round() as i64).collect();
        if seen.insert(sig, ()).is_none() {
            learners.push(PureLearner { predictions: (0..bits).map(|b| (code >> b) & 1 == 1).collect(), payoff });
        }
    }
    Ok(LearnerEnumeration { raw_count, learners })
}

/// Value of the zero-sum game with loss matrix `a[row][col]` (row player minimizes).
pub fn matrix_game_value(a: &[Vec<f64>]) -> Result<f64> {
    let cols = a.first().map_or(0, Vec::len);
    if cols == 0 {
        return Err(Error::InvalidParameter("empty payoff matrix".into()));
    }
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let x: Vec<_> = a.iter().map(|_| p.add_var(0.0, (0.0, 1.0))).collect();
    let t = p.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for c in 0..cols {
        let mut expr: Vec<_> = a.iter().zip(&x).map(|(row, &v)| (v, row[c])).collect();
        expr.push((t, -1.0));
        p.add_constraint(expr, ComparisonOp::Le, 0.0);
    }
    p.add_constraint(x.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    Ok(lp_solve(&p)?.objective())
}

/// `ε*` via explicit enumeration of deterministic learners and a matrix game.
pub fn optimal_fixed_error_by_enumeration(g: &GameInstance) -> Result<f64> {
    let e = enumerate_deterministic_learners(g)?;
    matrix_game_value(&e.learners.into_iter().map(|l| l.payoff).collect::<Vec<_>>())
}

/// `ε*(D, m)` for `m = 0..=m_max`.
pub fn optimal_error_curve(g: &GameInstance, m_max: usize) -> Result<Vec<f64>> {
    (0..=m_max).map(|m| Ok(optimal_fixed_error(&g.with(g.distribution.clone(), m)?)?.value)).collect()
}

/// `Σ_{S ∈ supp(D)^M} P(S)·ε*(D_S, M-1)` with `D_S` the empirical distribution of `S`.
pub fn expected_empirical_optimal_error(g: &GameInstance, big_m: usize) -> Result<f64> {
    if big_m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let supp = g.distribution.support().to_vec();
    let k = supp.len();
    let n_seq = (k as u128).pow(big_m as u32);
    if n_seq > SEQUENCE_CAP as u128 {
        return Err(Error::CapExceeded(format!("{n_seq} sample sequences > {SEQUENCE_CAP}")));
    }
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut total = 0.0;
    for s in 0..n_seq as usize {
        let mut idx = Vec::with_capacity(big_m);
        let mut r = s;
        let mut p = 1.0;
        for _ in 0..big_m {
            idx.push(r % k);
            p *= supp[r % k].1;
            r /= k;
        }
        idx.sort_unstable();
        let eps = match cache.get(&idx) {
            Some(&v) => v,
            None => {
                let pts: Vec<DomainPoint> = idx.iter().map(|&i| supp[i].0).collect();
                let v = optimal_fixed_error(&g.with(empirical_distribution(&pts)?, big_m - 1)?)?.value;
                cache.insert(idx, v);
                v
            }
        };
        total += p * eps;
    }
    Ok(total)
}
