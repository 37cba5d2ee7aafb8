//! Fully supervised learners: majority, ERM, the validation learner and the
//! random-guess mixture.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::distribution::DiscreteDistribution;
use crate::domain::{
    loss_distribution, mistakes, ConstantPredictor, DomainPoint, FairCoin, LabeledExample, Labeling, Predictor,
};
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::rng::RandomSource;
use crate::stats::{monte_carlo, Estimate};

pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn train(&self, t: &[LabeledExample], rng: &mut RandomSource) -> Result<Box<dyn Predictor>>;
}

/// Constant predictor: 1 iff at least half the labels are 1 (so empty `t` gives 1).
pub fn majority_train(t: &[LabeledExample]) -> ConstantPredictor {
    let ones = t.iter().filter(|e| e.label).count();
    ConstantPredictor(2 * ones >= t.len())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Majority;

impl Learner for Majority {
    fn name(&self) -> String {
        "majority".into()
    }

    fn train(&self, t: &[LabeledExample], _: &mut RandomSource) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(majority_train(t)))
    }
}

#[derive(Clone, Debug)]
pub enum TieBreakPolicy {
    LexicographicFirst,
    /// Worst consistent member against a known truth and marginal.
    AdversarialOracle { truth: Hypothesis, distribution: Arc<DiscreteDistribution> },
}

/// A consistent member of `class`, chosen per `policy`.
pub fn erm_train(class: &dyn HypothesisClass, t: &[LabeledExample], policy: &TieBreakPolicy) -> Result<Hypothesis> {
    let h = match policy {
        TieBreakPolicy::LexicographicFirst => class.first_consistent(t)?,
        TieBreakPolicy::AdversarialOracle { truth, distribution } => {
            class.worst_consistent(t, truth, distribution)?.map(|(h, _)| h)
        }
    };
    h.ok_or_else(|| Error::NoConsistentHypothesis(class.name()))
}

#[derive(Clone, Debug)]
pub struct Erm {
    pub class: Arc<dyn HypothesisClass>,
    pub policy: TieBreakPolicy,
}

impl Learner for Erm {
    fn name(&self) -> String {
        match self.policy {
            TieBreakPolicy::LexicographicFirst => "erm-lex".into(),
            TieBreakPolicy::AdversarialOracle { .. } => "erm-adversarial".into(),
        }
    }

    fn train(&self, t: &[LabeledExample], _: &mut RandomSource) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(erm_train(self.class.as_ref(), t, &self.policy)?))
    }
}

/// Monte-Carlo estimate of `E_S[max over consistent h of L(h, D_truth)]`.
pub fn adversarial_erm_error(
    class: &dyn HypothesisClass,
    d: &DiscreteDistribution,
    truth: &Hypothesis,
    m: usize,
    trials: usize,
    rng: &RandomSource,
) -> Result<Estimate> {
    monte_carlo(trials, rng, |r| {
        let t = truth.label_sample(&d.sample_iid(m, r))?;
        class
            .worst_consistent(&t, truth, d)?
            .map(|(_, l)| l)
            .ok_or_else(|| Error::NoConsistentHypothesis(class.name()))
    })
}

/// Output of the validation learner.
#[derive(Clone, Debug, PartialEq)]
pub enum Validated {
    Reference(Hypothesis),
    Majority(ConstantPredictor),
}

impl Predictor for Validated {
    fn prob_one(&self, x: &DomainPoint) -> Result<f64> {
        match self {
            Validated::Reference(h) => h.prob_one(x),
            Validated::Majority(c) => c.prob_one(x),
        }
    }
}

/// Split `t` at random into `T1` (`ceil(|t|/2)` examples) and `T2`; keep `h_s`
/// unless majority-on-`T1` makes strictly fewer mistakes on `T2`.
pub fn validation_learner_train(h_s: &Hypothesis, t: &[LabeledExample], rng: &mut RandomSource) -> Result<Validated> {
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.shuffle(rng);
    let cut = t.len().div_ceil(2);
    let t1: Vec<LabeledExample> = idx[..cut].iter().map(|&i| t[i]).collect();
    let t2: Vec<LabeledExample> = idx[cut..].iter().map(|&i| t[i]).collect();
    let maj = majority_train(&t1);
    Ok(if mistakes(h_s, &t2)? <= mistakes(&maj, &t2)? { Validated::Reference(h_s.clone()) } else { Validated::Majority(maj) })
}

#[derive(Clone, Debug)]
pub struct ValidationLearner {
    pub reference: Hypothesis,
}

impl Learner for ValidationLearner {
    fn name(&self) -> String {
        "validation".into()
    }

    fn train(&self, t: &[LabeledExample], rng: &mut RandomSource) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(validation_learner_train(&self.reference, t, rng)?))
    }
}

/// Probability that the mixture learner guesses: `min(1, 2 c^m)`.
pub fn guess_probability(c: f64, m: usize) -> f64 {
    (2.0 * c.powi(m as i32)).min(1.0)
}

/// With probability `min(1, 2 c^|t|)` a fair coin, otherwise `base(t)`.
pub fn mixture_learner_train(
    base: &dyn Learner,
    c: f64,
    t: &[LabeledExample],
    rng: &mut RandomSource,
) -> Result<Box<dyn Predictor>> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!("mixture constant {c} outside [0, 1)")));
    }
    if rng.random_bool(guess_probability(c, t.len())) {
        Ok(Box::new(FairCoin))
    } else {
        base.train(t, rng)
    }
}

#[derive(Clone)]
pub struct Mixture {
    pub base: Arc<dyn Learner>,
    pub c: f64,
}

impl Learner for Mixture {
    fn name(&self) -> String {
        format!("mixture({})", self.base.name())
    }

    fn train(&self, t: &[LabeledExample], rng: &mut RandomSource) -> Result<Box<dyn Predictor>> {
        mixture_learner_train(self.base.as_ref(), self.c, t, rng)
    }
}

/// `E_{S ~ D_h^m}[L(A(S), D_h)]` by Monte Carlo, with exact inner loss.
pub fn learner_error(
    learner: &dyn Learner,
    d: &DiscreteDistribution,
    truth: &dyn Labeling,
    m: usize,
    trials: usize,
    rng: &RandomSource,
) -> Result<Estimate> {
    monte_carlo(trials, rng, |r| {
        let t = truth.label_sample(&d.sample_iid(m, r))?;
        let p = learner.train(&t, r)?;
        loss_distribution(p.as_ref(), d, truth)
    })
}

/// Maximum of [`learner_error`] over a finite truth set, and the index attaining it.
pub fn worst_truth_error(
    learner: &dyn Learner,
    d: &DiscreteDistribution,
    truths: &[Hypothesis],
    m: usize,
    trials: usize,
    rng: &RandomSource,
) -> Result<(usize, Estimate)> {
    if truths.is_empty() {
        return Err(Error::InvalidParameter("empty truth set".into()));
    }
    let mut best: Option<(usize, Estimate)> = None;
    for (i, h) in truths.iter().enumerate() {
        let e = learner_error(learner, d, h, m, trials, &rng.fork(i as u64))?;
        if best.is_none_or(|(_, b)| e.mean > b.mean) {
            best = Some((i, e));
        }
    }
    Ok(best.expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::RowClass;
    use crate::domain::loss_sample;
    use crate::hypothesis::FiniteClass;

    fn f(i: u64) -> DomainPoint {
        DomainPoint::flat(i)
    }

    fn ex(i: u64, y: bool) -> LabeledExample {
        LabeledExample::new(f(i), y)
    }

    #[test]
    fn majority_examples() {
        assert_eq!(majority_train(&[ex(0, true), ex(1, true), ex(2, false)]), ConstantPredictor(true));
        assert_eq!(majority_train(&[ex(0, false), ex(1, false), ex(2, false)]), ConstantPredictor(false));
        assert_eq!(majority_train(&[ex(0, true), ex(1, false)]), ConstantPredictor(true));
        assert_eq!(majority_train(&[]), ConstantPredictor(true));
    }

    #[test]
    fn erm_examples() {
        let full = FiniteClass::full(&[f(1), f(2)]);
        let h = erm_train(&full, &[ex(1, false)], &TieBreakPolicy::LexicographicFirst).unwrap();
        assert_eq!(h.behavior(&[f(1), f(2)]).unwrap(), vec![false, false]);
        let g = Hypothesis::table([(f(1), true)], Some(false));
        let single = FiniteClass::singleton(g.clone());
        assert_eq!(erm_train(&single, &[ex(1, true)], &TieBreakPolicy::LexicographicFirst).unwrap(), g);
        assert!(matches!(
            erm_train(&single, &[ex(1, false)], &TieBreakPolicy::LexicographicFirst),
            Err(Error::NoConsistentHypothesis(_))
        ));
        let row = RowClass::new(10, 2).unwrap();
        let t: Vec<_> = (1..=3).map(|c| LabeledExample::new(DomainPoint::row(10, c).unwrap(), false)).collect();
        let h = erm_train(&row, &t, &TieBreakPolicy::LexicographicFirst).unwrap();
        assert_eq!(loss_sample(&h, &t).unwrap(), 0.0);
        assert!(row.members().unwrap().contains(&h));
    }

    #[test]
    fn adversarial_erm_two_points() {
        // Truth (0,1) under uniform D, m = 1: the unseen point is always wrong.
        let dom = [f(0), f(1)];
        let c = FiniteClass::full(&dom);
        let d = DiscreteDistribution::uniform(dom.to_vec()).unwrap();
        let truth = Hypothesis::table([(f(0), false), (f(1), true)], None);
        let e = adversarial_erm_error(&c, &d, &truth, 1, 200, &RandomSource::new(1, 0)).unwrap();
        assert_eq!(e.mean, 0.5);
        let s = FiniteClass::singleton(truth.clone());
        assert_eq!(adversarial_erm_error(&s, &d, &truth, 3, 50, &RandomSource::new(1, 0)).unwrap().mean, 0.0);
    }

    #[test]
    fn adversarial_needs_oracle() {
        #[derive(Debug)]
        struct Opaque;
        impl HypothesisClass for Opaque {
            fn name(&self) -> String {
                "opaque".into()
            }
            fn is_consistent(&self, _: &[LabeledExample]) -> bool {
                true
            }
        }
        let d = DiscreteDistribution::point_mass(f(0));
        let h = Hypothesis::constant(true);
        let e = adversarial_erm_error(&Opaque, &d, &h, 1, 5, &RandomSource::new(0, 0));
        assert!(matches!(e, Err(Error::OracleUnavailable(_))));
    }

    #[test]
    fn validation_examples() {
        let h = Hypothesis::table([(f(0), true), (f(1), false), (f(2), false)], Some(true));
        let mut r = RandomSource::new(1, 0);
        let t = [ex(0, true), ex(1, false), ex(2, false), ex(3, true)];
        assert_eq!(validation_learner_train(&h, &t, &mut r).unwrap(), Validated::Reference(h.clone()));
        // |T| = 1 leaves T2 empty: tie, keep h_S.
        assert_eq!(validation_learner_train(&h, &[ex(0, false)], &mut r).unwrap(), Validated::Reference(h.clone()));
        // Exact tie on T2: h_S wrong once, majority wrong once.
        let g = Hypothesis::constant(false);
        let t = [ex(5, true), ex(6, true), ex(7, false), ex(8, true)];
        for s in 0..20 {
            let mut r = RandomSource::new(s, 0);
            let out = validation_learner_train(&g, &t, &mut r).unwrap();
            let mut idx: Vec<usize> = (0..4).collect();
            idx.shuffle(&mut RandomSource::new(s, 0));
            let t2: Vec<_> = idx[2..].iter().map(|&i| t[i]).collect();
            let lg = mistakes(&g, &t2).unwrap();
            let lm = mistakes(&majority_train(&idx[..2].iter().map(|&i| t[i]).collect::<Vec<_>>()), &t2).unwrap();
            assert_eq!(out == Validated::Reference(g.clone()), lg <= lm);
            assert_eq!(mistakes(&out, &t2).unwrap(), lg.min(lm));
        }
    }

    #[test]
    fn mixture_examples() {
        let mut r = RandomSource::new(2, 0);
        for _ in 0..50 {
            let p = mixture_learner_train(&Majority, 0.0, &[ex(0, false)], &mut r).unwrap();
            assert_eq!(p.prob_one(&f(9)).unwrap(), 0.0);
        }
        assert_eq!(guess_probability(0.0, 0), 1.0);
        assert_eq!(guess_probability(0.7, 0), 1.0);
        let p = mixture_learner_train(&Majority, 0.0, &[], &mut r).unwrap();
        assert_eq!(p.prob_one(&f(9)).unwrap(), 0.5);
        assert!(mixture_learner_train(&Majority, 1.0, &[], &mut r).is_err());
    }

    #[test]
    fn mixture_guess_frequency() {
        let (c, m, n) = (0.8f64, 3usize, 10_000usize);
        let t: Vec<_> = (0..m as u64).map(|i| ex(i, false)).collect();
        let guesses = (0..n)
            .filter(|&i| {
                let mut r = RandomSource::new(77, i as u64);
                mixture_learner_train(&Majority, c, &t, &mut r).unwrap().prob_one(&f(0)).unwrap() == 0.5
            })
            .count();
        let p = guess_probability(c, m);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((guesses as f64 / n as f64 - p).abs() <= 3.0 * se, "{guesses} vs {p}");
    }

    #[test]
    fn mixture_error_bound() {
        // eps_B(D', m) <= 1 - c^m whenever 2c^m <= 1; once clipped the
        // mixture always guesses.
        let dom = [f(0), f(1), f(2)];
        let d = DiscreteDistribution::new(vec![(f(0), 0.5), (f(1), 0.3), (f(2), 0.2)]).unwrap();
        let truth = Hypothesis::table([(f(0), true), (f(1), false), (f(2), true)], None);
        let base: Arc<dyn Learner> = Arc::new(Erm {
            class: Arc::new(FiniteClass::full(&dom)),
            policy: TieBreakPolicy::LexicographicFirst,
        });
        let c = 0.6;
        for m in 0..6 {
            let mix = Mixture { base: base.clone(), c };
            let e = learner_error(&mix, &d, &truth, m, 2000, &RandomSource::new(5, m as u64)).unwrap();
            if guess_probability(c, m) < 1.0 {
                assert!(e.mean <= 1.0 - c.powi(m as i32) + 3.0 * e.std_error, "m={m}: {}", e.mean);
            } else {
                assert_eq!(e.mean, 0.5, "m={m}");
            }
        }
    }
}
