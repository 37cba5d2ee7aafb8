//! Named experiments and the components they share.

mod nonmonotone;
mod probe;
mod separation;
mod soundness;
mod square;
mod tester;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::construct::{sample_set_system, SetSystem, SetSystemThresholds, DEFAULT_RETRY_CAP};
use crate::distribution::DiscreteDistribution;
use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::learners::{worst_truth_error, Erm, Learner, Majority, Mixture, TieBreakPolicy, ValidationLearner};
use crate::oig::OigLearner;
use crate::rng::RandomSource;
use crate::stats::Estimate;

use super::config::{ExperimentConfig, SetSystemSpec};
use super::results::ResultTable;

pub(crate) fn dispatch(cfg: &ExperimentConfig) -> Result<ResultTable> {
    match cfg.experiment.as_str() {
        "separation" => separation::run(cfg),
        "square-blowup" => square::run(cfg),
        "tester-calibration" => tester::run(cfg),
        "soundness" => soundness::run(cfg),
        "average-error-probe" => probe::run(cfg),
        "nonmonotone-demo" => nonmonotone::run(cfg),
        other => Err(Error::UnknownExperiment(other.into())),
    }
}

/// What a learner name may need beyond the class.
#[derive(Clone)]
pub struct LearnerContext {
    pub class: Arc<dyn HypothesisClass>,
    pub distribution: Option<Arc<DiscreteDistribution>>,
    pub truth: Option<Hypothesis>,
    pub reference: Option<Hypothesis>,
    pub mixture_c: f64,
}

impl LearnerContext {
    pub fn new(class: Arc<dyn HypothesisClass>) -> Self {
        Self { class, distribution: None, truth: None, reference: None, mixture_c: 0.5 }
    }
}

pub fn resolve_learner(name: &str, ctx: &LearnerContext) -> Result<Arc<dyn Learner>> {
    let missing = |what: &str| Error::Config(format!("learner {name} needs {what}"));
    Ok(match name {
        "majority" => Arc::new(Majority),
        "erm-lex" => Arc::new(Erm { class: ctx.class.clone(), policy: TieBreakPolicy::LexicographicFirst }),
        "erm-adversarial" => Arc::new(Erm {
            class: ctx.class.clone(),
            policy: TieBreakPolicy::AdversarialOracle {
                truth: ctx.truth.clone().ok_or_else(|| missing("a truth"))?,
                distribution: ctx.distribution.clone().ok_or_else(|| missing("a distribution"))?,
            },
        }),
        "validation" => Arc::new(ValidationLearner { reference: ctx.reference.clone().ok_or_else(|| missing("a reference"))? }),
        "mixture" => Arc::new(Mixture {
            base: Arc::new(Erm { class: ctx.class.clone(), policy: TieBreakPolicy::LexicographicFirst }),
            c: ctx.mixture_c,
        }),
        "oig" => Arc::new(OigLearner::new(ctx.class.clone())),
        other => return Err(Error::UnknownComponent(format!("learner {other}"))),
    })
}

/// One line of an error-rate table: the worst error over a truth set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateRow {
    pub distribution: String,
    pub m: usize,
    pub estimate: Estimate,
    pub worst_truth: usize,
}

pub fn estimate_error_rate(
    learner: &dyn Learner,
    d: &DiscreteDistribution,
    distribution: &str,
    truths: &[Hypothesis],
    m: usize,
    trials: usize,
    rng: &RandomSource,
) -> Result<ErrorRateRow> {
    let (worst_truth, estimate) = worst_truth_error(learner, d, truths, m, trials, rng)?;
    Ok(ErrorRateRow { distribution: distribution.into(), m, estimate, worst_truth })
}

/// Marginals on row `n` (plus off-row points) used by the tester and audits.
#[derive(Clone, Debug, PartialEq)]
pub enum RowDistribution {
    Uniform,
    /// Uniform on columns `1..=k`.
    SubsetUniform(u32),
    PointMass,
    /// `(1-p)`·uniform on the row plus `p`·uniform on row `n+1`.
    OffSupport(f64),
    /// Half the columns at `(1+2e)/n`, half at `(1-2e)/n`: TV `e` for even `n`.
    Perturbed(f64),
    Custom(DiscreteDistribution),
}

pub fn parse_tester_distribution(s: &str) -> Result<RowDistribution> {
    let bad = || Error::Config(format!("unknown distribution spec {s:?}"));
    if s.trim_start().starts_with('{') {
        return Ok(RowDistribution::Custom(serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?));
    }
    let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a)));
    let num = |a: Option<&str>| a.and_then(|a| a.parse::<f64>().ok()).ok_or_else(bad);
    Ok(match head {
        "uniform" if arg.is_none() => RowDistribution::Uniform,
        "pointmass" if arg.is_none() => RowDistribution::PointMass,
        "subset-uniform" => RowDistribution::SubsetUniform(arg.and_then(|a| a.parse().ok()).ok_or_else(bad)?),
        "off-support" => RowDistribution::OffSupport(num(arg)?),
        "perturbed" => RowDistribution::Perturbed(num(arg)?),
        _ => return Err(bad()),
    })
}

impl RowDistribution {
    pub fn build(&self, n: u32) -> Result<DiscreteDistribution> {
        let row = |r: u32, cols: std::ops::RangeInclusive<u32>| -> Result<Vec<DomainPoint>> {
            cols.map(|c| DomainPoint::row(r, c)).collect()
        };
        match self {
            RowDistribution::Uniform => DiscreteDistribution::uniform(row(n, 1..=n)?),
            RowDistribution::SubsetUniform(k) => {
                if *k == 0 || *k > n {
                    return Err(Error::Config(format!("subset size {k} not in 1..={n}")));
                }
                DiscreteDistribution::uniform(row(n, 1..=*k)?)
            }
            RowDistribution::PointMass => Ok(DiscreteDistribution::point_mass(DomainPoint::row(n, 1)?)),
            RowDistribution::OffSupport(p) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Config(format!("off-support mass {p} not in [0,1]")));
                }
                let on = row(n, 1..=n)?.into_iter().map(|x| (x, (1.0 - p) / f64::from(n)));
                let off = row(n + 1, 1..=n)?.into_iter().map(|x| (x, p / f64::from(n)));
                DiscreteDistribution::from_weights(on.chain(off).filter(|(_, w)| *w > 0.0).collect())
            }
            RowDistribution::Perturbed(e) => {
                if !(0.0..0.5).contains(e) {
                    return Err(Error::Config(format!("perturbation {e} not in [0, 1/2)")));
                }
                let half = n / 2;
                let w = row(n, 1..=n)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let i = i as u32;
                        let f = if i < half {
                            1.0 + 2.0 * e
                        } else if i < 2 * half {
                            1.0 - 2.0 * e
                        } else {
                            1.0
                        };
                        (x, f / f64::from(n))
                    })
                    .collect();
                DiscreteDistribution::from_weights(w)
            }
            RowDistribution::Custom(d) => Ok(d.clone()),
        }
    }
}

pub(crate) fn build_set_system(spec: &SetSystemSpec, rng: &RandomSource) -> Result<SetSystem> {
    let (system, _) = sample_set_system(
        spec.universe,
        spec.n,
        spec.k,
        &SetSystemThresholds::intersection_only(spec.intersection),
        spec.retries.unwrap_or(DEFAULT_RETRY_CAP),
        rng,
    )?;
    Ok(system)
}

/// Mean of independent estimates, with their combined standard error.
pub(crate) fn average(estimates: &[Estimate]) -> Estimate {
    let k = estimates.len() as f64;
    let mean = estimates.iter().map(|e| e.mean).sum::<f64>() / k;
    let std_error = estimates.iter().map(|e| e.std_error.powi(2)).sum::<f64>().sqrt() / k;
    let trials: usize = estimates.iter().map(|e| e.trials).sum();
    Estimate { mean, std_error, ci_half_width: (1.96 * std_error).max(1.0 / trials.max(1) as f64), trials }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::tv_distance;

    #[test]
    fn distribution_specs() {
        let u = parse_tester_distribution("uniform").unwrap().build(100).unwrap();
        assert_eq!(u.len(), 100);
        let half = parse_tester_distribution("subset-uniform:50").unwrap().build(100).unwrap();
        assert!((tv_distance(&u, &half) - 0.5).abs() < 1e-12);
        let off = parse_tester_distribution("off-support:0.4").unwrap().build(100).unwrap();
        assert!((tv_distance(&u, &off) - 0.4).abs() < 1e-12);
        let close = parse_tester_distribution("perturbed:0.05").unwrap().build(100).unwrap();
        assert!((tv_distance(&u, &close) - 0.05).abs() < 1e-12);
        let pm = parse_tester_distribution("pointmass").unwrap().build(100).unwrap();
        assert!((tv_distance(&u, &pm) - 0.99).abs() < 1e-12);
        let custom = parse_tester_distribution("{\"support\":[[[4,1],1.0]]}").unwrap().build(4).unwrap();
        assert_eq!(custom, DiscreteDistribution::point_mass(DomainPoint::row(4, 1).unwrap()));
        for bad in ["zipf", "uniform:3", "subset-uniform", "off-support:x", "{"] {
            assert!(parse_tester_distribution(bad).is_err(), "{bad}");
        }
        assert!(parse_tester_distribution("subset-uniform:101").unwrap().build(100).is_err());
    }

    #[test]
    fn learner_names_resolve() {
        let class: Arc<dyn HypothesisClass> = Arc::new(crate::construct::RowClass::new(10, 2).unwrap());
        let mut ctx = LearnerContext::new(class);
        for name in ["majority", "erm-lex", "mixture", "oig"] {
            assert_eq!(resolve_learner(name, &ctx).unwrap().name().starts_with(&name[..3]), true);
        }
        assert!(resolve_learner("erm-adversarial", &ctx).is_err());
        assert!(resolve_learner("validation", &ctx).is_err());
        ctx.truth = Some(Hypothesis::constant(false));
        ctx.distribution = Some(Arc::new(DiscreteDistribution::point_mass(DomainPoint::row(10, 1).unwrap())));
        ctx.reference = Some(Hypothesis::constant(false));
        assert_eq!(resolve_learner("erm-adversarial", &ctx).unwrap().name(), "erm-adversarial");
        assert_eq!(resolve_learner("validation", &ctx).unwrap().name(), "validation");
        assert!(matches!(resolve_learner("knn", &ctx), Err(Error::UnknownComponent(_))));
    }

    #[test]
    fn average_of_estimates() {
        let a = Estimate::from_values(&[0.0, 1.0]);
        let b = Estimate::from_values(&[1.0, 1.0]);
        let avg = average(&[a, b]);
        assert_eq!(avg.mean, 0.75);
        assert!((avg.std_error - a.std_error / 2.0).abs() < 1e-15);
        assert_eq!(avg.trials, 4);
    }
}
