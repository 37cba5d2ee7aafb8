//! Standalone certifier audits, also used by the soundness experiment.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{RegimeMode, ResolvedRow, RowSpec, SetSystemSpec};
use super::experiments::{build_set_system, parse_tester_distribution, resolve_learner, LearnerContext};
use crate::certify::{soundness_audit, BatteryEntry, CertificationReport, MajorityCertifier, SetCertifier};
use crate::construct::{sample_labelings, RowClass};
use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::hypothesis::HypothesisClass;
use crate::rng::RandomSource;

/// Which certifier an [`AuditConfig`] audits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditCertifier {
    /// The majority certifier on a row class (`[row]`).
    Majority,
    /// The set certifier for set 0 of a sampled set system (`[set_system]`).
    Set,
}

/// Battery entries are distribution specs. Row audits take the tester specs
/// (`uniform`, `subset-uniform:k`, ...). Set audits take `set:i`,
/// `half-set:i` and `perturbed-set:e`, the last a perturbation of set 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub certifier: AuditCertifier,
    pub learner: String,
    pub seed: u64,
    pub trials: usize,
    pub m_grid: Vec<usize>,
    pub battery: Vec<String>,
    #[serde(default)]
    pub regime_mode: RegimeMode,
    #[serde(default)]
    pub row: Option<RowSpec>,
    #[serde(default)]
    pub set_system: Option<SetSystemSpec>,
}

impl AuditConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_grid.is_empty() || self.battery.is_empty() {
            return Err(Error::Config("audit needs a nonempty m_grid and battery".into()));
        }
        match self.certifier {
            AuditCertifier::Majority => {
                let row = self.row.as_ref().ok_or_else(|| Error::Config("majority audit needs [row]".into()))?;
                row.resolve(self.regime_mode)?;
                for b in &self.battery {
                    parse_tester_distribution(b)?;
                }
            }
            AuditCertifier::Set => {
                self.set_system.as_ref().ok_or_else(|| Error::Config("set audit needs [set_system]".into()))?;
                for b in &self.battery {
                    parse_set_distribution(b)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum SetDistribution {
    Set(usize),
    HalfSet(usize),
    Perturbed(f64),
}

fn parse_set_distribution(s: &str) -> Result<SetDistribution> {
    let bad = || Error::Config(format!("unknown set distribution spec {s:?}"));
    let (head, arg) = s.split_once(':').ok_or_else(bad)?;
    Ok(match head {
        "set" => SetDistribution::Set(arg.parse().map_err(|_| bad())?),
        "half-set" => SetDistribution::HalfSet(arg.parse().map_err(|_| bad())?),
        "perturbed-set" => {
            let e: f64 = arg.parse().map_err(|_| bad())?;
            if !(0.0..0.5).contains(&e) {
                return Err(bad());
            }
            SetDistribution::Perturbed(e)
        }
        _ => return Err(bad()),
    })
}

/// Set 0's marginal with half its points at `(1+2e)/n` and half at `(1-2e)/n`.
fn perturbed_uniform(points: &[crate::domain::DomainPoint], e: f64) -> Result<DiscreteDistribution> {
    let n = points.len();
    let half = n / 2;
    let w = points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = if i < half {
                1.0 + 2.0 * e
            } else if i < 2 * half {
                1.0 - 2.0 * e
            } else {
                1.0
            };
            (x, f / n as f64)
        })
        .collect();
    DiscreteDistribution::from_weights(w)
}

/// Audits the majority certifier for `row`; truths are both canonical members.
pub fn row_audit(
    row: &ResolvedRow,
    learner: &str,
    battery: &[String],
    m_grid: &[usize],
    trials: usize,
    rng: &RandomSource,
) -> Result<(MajorityCertifier, CertificationReport)> {
    let gate = row.m_gate.ok_or_else(|| Error::Config("majority audit needs row.m_gate".into()))?;
    let class = Arc::new(RowClass::new(row.n, row.big_m)?);
    let cert = MajorityCertifier::new(row.n, row.xi, gate)?;
    let truths = vec![class.canonical(true), class.canonical(false)];
    let mut ctx = LearnerContext::new(class.clone() as Arc<dyn HypothesisClass>);
    ctx.reference = Some(class.canonical(true));
    let learner = resolve_learner(learner, &ctx)?;
    let battery = battery
        .iter()
        .map(|id| {
            let distribution = parse_tester_distribution(id)?.build(row.n)?;
            Ok(BatteryEntry { id: id.clone(), distribution, truths: truths.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = soundness_audit(&cert, learner.as_ref(), &battery, m_grid, trials, rng)?;
    Ok((cert, report))
}

/// Audits the set certifier for set 0 of a system sampled from `rng.fork(0)`;
/// truths are the labelings of sets 0, 1 and 2.
pub fn set_audit(
    spec: &SetSystemSpec,
    learner: &str,
    battery: &[String],
    m_grid: &[usize],
    trials: usize,
    rng: &RandomSource,
) -> Result<(SetCertifier, CertificationReport)> {
    let xi = spec.xi.ok_or_else(|| Error::Config("set audit needs set_system.xi".into()))?;
    let gate = spec.m_gate.ok_or_else(|| Error::Config("set audit needs set_system.m_gate".into()))?;
    let system = build_set_system(spec, &rng.fork(0))?;
    let class = Arc::new(sample_labelings(&system, &mut rng.fork(1)));
    let s0 = system.points(0);
    let cert = SetCertifier::new(s0.clone(), xi, gate)?;
    let truths: Vec<_> = (0..system.len().min(3)).map(|i| class.hypothesis(i).clone()).collect();
    let mut ctx = LearnerContext::new(class.clone() as Arc<dyn HypothesisClass>);
    ctx.reference = Some(class.hypothesis(0).clone());
    let learner = resolve_learner(learner, &ctx)?;
    let set = |i: usize| {
        if i < system.len() {
            Ok(i)
        } else {
            Err(Error::Config(format!("set {i} out of range ({} sets)", system.len())))
        }
    };
    let battery = battery
        .iter()
        .map(|id| {
            let distribution = match parse_set_distribution(id)? {
                SetDistribution::Set(i) => system.uniform_on(set(i)?),
                SetDistribution::HalfSet(i) => {
                    let p = system.points(set(i)?);
                    DiscreteDistribution::uniform(p[..(p.len() / 2).max(1)].to_vec())?
                }
                SetDistribution::Perturbed(e) => perturbed_uniform(&s0, e)?,
            };
            Ok(BatteryEntry { id: id.clone(), distribution, truths: truths.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = soundness_audit(&cert, learner.as_ref(), &battery, m_grid, trials, &rng.fork(2))?;
    Ok((cert, report))
}

pub fn run_audit(cfg: &AuditConfig) -> Result<CertificationReport> {
    cfg.validate()?;
    let rng = RandomSource::new(cfg.seed, 0);
    Ok(match cfg.certifier {
        AuditCertifier::Majority => {
            let row = cfg.row.as_ref().expect("validated").resolve(cfg.regime_mode)?;
            row_audit(&row, &cfg.learner, &cfg.battery, &cfg.m_grid, cfg.trials, &rng)?.1
        }
        AuditCertifier::Set => {
            let spec = cfg.set_system.as_ref().expect("validated");
            set_audit(spec, &cfg.learner, &cfg.battery, &cfg.m_grid, cfg.trials, &rng)?.1
        }
    })
}

/// One CSV line per audit cell.
pub fn report_to_csv(report: &CertificationReport) -> Result<String> {
    #[derive(Serialize)]
    struct Line<'a> {
        certifier: &'a str,
        learner: &'a str,
        distribution: &'a str,
        m: usize,
        certificate: f64,
        certificate_se: f64,
        error: f64,
        error_se: f64,
        worst_truth: usize,
        tolerance: f64,
        sound: bool,
        verdict: &'a str,
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        w.serialize(Line {
            certifier: &report.certifier.kind,
            learner: &report.learner,
            distribution: &r.distribution,
            m: r.m,
            certificate: r.certificate.mean,
            certificate_se: r.certificate.std_error,
            error: r.error.mean,
            error_se: r.error.std_error,
            worst_truth: r.worst_truth,
            tolerance: r.tolerance,
            sound: r.sound,
            verdict: &r.verdict,
        })
        .map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_row() -> AuditConfig {
        AuditConfig {
            certifier: AuditCertifier::Majority,
            learner: "majority".into(),
            seed: 7,
            trials: 30,
            m_grid: vec![5],
            battery: vec!["uniform".into(), "pointmass".into()],
            regime_mode: RegimeMode::DirectParameters,
            row: Some(RowSpec { n: 20, big_m: Some(2), beta: None, m_gate: Some(1000), xi: None }),
            set_system: None,
        }
    }

    #[test]
    fn below_gate_certificate_is_one() {
        let rep = run_audit(&small_row()).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows.iter().all(|r| r.certificate.mean == 1.0 && r.sound && r.verdict == "statistical"));
        let csv = report_to_csv(&rep).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("certifier,learner,distribution,m,"));
    }

    #[test]
    fn config_round_trip_and_validation() {
        let c = small_row();
        assert_eq!(AuditConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
        let mut bad = c.clone();
        bad.battery = vec!["set:0".into()];
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.certifier = AuditCertifier::Set;
        assert!(bad.validate().is_err());
        for s in ["set:x", "perturbed-set:0.7", "tile:1"] {
            assert!(parse_set_distribution(s).is_err(), "{s}");
        }
        assert_eq!(parse_set_distribution("half-set:2").unwrap(), SetDistribution::HalfSet(2));
    }

    #[test]
    fn set_audit_runs() {
        let spec = SetSystemSpec { universe: 64, n: 16, k: 4, intersection: 10, xi: Some(0.1), m_gate: Some(10_000), retries: None };
        let battery: Vec<String> = ["set:0", "set:1", "half-set:0", "perturbed-set:0.05"].map(String::from).to_vec();
        let (_, rep) = set_audit(&spec, "validation", &battery, &[4], 30, &RandomSource::new(3, 0)).unwrap();
        assert_eq!(rep.rows.len(), 4);
        assert!(rep.all_sound());
    }
}
