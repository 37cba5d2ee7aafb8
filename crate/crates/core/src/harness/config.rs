use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construct::RowSchedule;
use crate::error::{Error, Result};

pub const EXPERIMENTS: [&str; 6] =
    ["separation", "square-blowup", "tester-calibration", "soundness", "average-error-probe", "nonmonotone-demo"];

pub const LEARNERS: [&str; 6] = ["majority", "erm-lex", "erm-adversarial", "validation", "mixture", "oig"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeMode {
    PaperSchedule,
    #[default]
    DirectParameters,
}

impl fmt::Display for RegimeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeMode::PaperSchedule => "paper-schedule",
            RegimeMode::DirectParameters => "direct-parameters",
        })
    }
}

/// Row class parameters. Paper-schedule mode derives `big_m`, `m_gate` and
/// `xi` from `beta`; direct mode takes them as given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub n: u32,
    #[serde(default)]
    pub big_m: Option<u32>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub m_gate: Option<u64>,
    #[serde(default)]
    pub xi: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedRow {
    pub n: u32,
    pub big_m: u32,
    pub m_gate: Option<u64>,
    pub xi: f64,
}

impl RowSpec {
    pub fn resolve(&self, mode: RegimeMode) -> Result<ResolvedRow> {
        match mode {
            RegimeMode::PaperSchedule => {
                let beta = self.beta.ok_or_else(|| Error::Config("paper-schedule mode needs row.beta".into()))?;
                let s = RowSchedule::asymptotic(self.n, beta);
                Ok(ResolvedRow { n: s.n, big_m: s.big_m, m_gate: Some(s.m_gate), xi: s.xi })
            }
            RegimeMode::DirectParameters => {
                let big_m = self.big_m.ok_or_else(|| Error::Config("direct-parameters mode needs row.big_m".into()))?;
                Ok(ResolvedRow {
                    n: self.n,
                    big_m,
                    m_gate: self.m_gate,
                    xi: self.xi.unwrap_or(f64::from(big_m) / f64::from(self.n)),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TesterSpec {
    pub n: u32,
    pub xi: f64,
    pub delta: f64,
    /// Defaults to the modified tester's bound at `ξ/2`.
    #[serde(default)]
    pub sample_size: Option<u64>,
    pub distributions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSystemSpec {
    pub universe: u64,
    pub n: usize,
    pub k: usize,
    pub intersection: usize,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub m_gate: Option<u64>,
    #[serde(default)]
    pub retries: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TinySpec {
    pub instances: usize,
    pub max_domain: usize,
    pub max_class: usize,
    pub big_m: Vec<usize>,
    pub gamma_m: Vec<u64>,
    pub gamma_c: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub trials: usize,
    #[serde(default)]
    pub regime_mode: RegimeMode,
    #[serde(default)]
    pub m_grid: Vec<usize>,
    #[serde(default)]
    pub learners: Vec<String>,
    /// Statistical tolerance in standard errors.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
    /// Named bound overrides, e.g. `majority_max = 0.03`.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    pub row: Option<RowSpec>,
    #[serde(default)]
    pub tester: Option<TesterSpec>,
    #[serde(default)]
    pub set_system: Option<SetSystemSpec>,
    #[serde(default)]
    pub tiny: Option<TinySpec>,
}

fn default_sigmas() -> f64 {
    3.0
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    pub const DEFAULT_SEED: u64 = 20_240_917;

    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn threshold(&self, name: &str, default: f64) -> f64 {
        self.thresholds.get(name).copied().unwrap_or(default)
    }

    fn base(experiment: &str, trials: usize) -> Self {
        ExperimentConfig {
            experiment: experiment.into(),
            seed: Self::DEFAULT_SEED,
            trials,
            regime_mode: RegimeMode::DirectParameters,
            m_grid: Vec::new(),
            learners: Vec::new(),
            sigmas: default_sigmas(),
            thresholds: BTreeMap::new(),
            row: None,
            tester: None,
            set_system: None,
            tiny: None,
        }
    }

    /// Desk-scale defaults for each named experiment.
    pub fn preset(experiment: &str) -> Result<Self> {
        let mut c = match experiment {
            "separation" => {
                let mut c = Self::base(experiment, 1000);
                c.m_grid = vec![50];
                c.learners = names(&["majority", "erm-adversarial", "oig"]);
                c.row = Some(RowSpec { n: 10_000, big_m: Some(100), beta: None, m_gate: None, xi: None });
                c
            }
            "square-blowup" => {
                let mut c = Self::base(experiment, 400);
                c.learners = names(&["oig"]);
                c.tiny = Some(TinySpec {
                    instances: 20,
                    max_domain: 3,
                    max_class: 8,
                    big_m: vec![2, 3, 4],
                    gamma_m: (3..=10).collect(),
                    gamma_c: vec![3.0, 5.0, 10.0],
                });
                c
            }
            "tester-calibration" => {
                let mut c = Self::base(experiment, 100);
                c.tester = Some(TesterSpec {
                    n: 100,
                    xi: 0.3,
                    delta: 0.2,
                    sample_size: None,
                    distributions: names(&["uniform", "subset-uniform:50", "pointmass", "off-support:0.4"]),
                });
                c
            }
            "soundness" => {
                let mut c = Self::base(experiment, 50);
                c.m_grid = vec![20, 305_000];
                c.learners = names(&["majority", "validation"]);
                c.row = Some(RowSpec { n: 100, big_m: Some(10), beta: None, m_gate: Some(305_000), xi: None });
                c.set_system = Some(SetSystemSpec {
                    universe: 1000,
                    n: 100,
                    k: 8,
                    intersection: 40,
                    xi: Some(0.1),
                    m_gate: Some(305_000),
                    retries: None,
                });
                c
            }
            "average-error-probe" => {
                let mut c = Self::base(experiment, 30);
                c.m_grid = vec![1, 2];
                c.learners = names(&["majority", "erm-lex", "oig"]);
                c.set_system = Some(SetSystemSpec {
                    universe: 128,
                    n: 64,
                    k: 64,
                    intersection: 52,
                    xi: None,
                    m_gate: None,
                    retries: None,
                });
                c
            }
            "nonmonotone-demo" => {
                let mut c = Self::base(experiment, 200);
                c.m_grid = vec![1, 4, 16];
                c.learners = names(&["majority", "erm-lex", "oig"]);
                c.set_system = Some(SetSystemSpec {
                    universe: 64,
                    n: 16,
                    k: 8,
                    intersection: 10,
                    xi: Some(0.1),
                    m_gate: Some(2000),
                    retries: None,
                });
                c
            }
            other => return Err(Error::UnknownExperiment(other.into())),
        };
        c.regime_mode = RegimeMode::DirectParameters;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(Error::UnknownExperiment(self.experiment.clone()));
        }
        if let Some(l) = self.learners.iter().find(|l| !LEARNERS.contains(&l.as_str())) {
            return Err(Error::UnknownComponent(format!("learner {l}")));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if !(self.sigmas > 0.0) {
            return Err(Error::Config("sigmas must be positive".into()));
        }
        let need = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(Error::Config(format!("{} needs a [{section}] section", self.experiment)))
            }
        };
        match self.experiment.as_str() {
            "separation" => {
                need(self.row.is_some(), "row")?;
                self.row.as_ref().expect("checked").resolve(self.regime_mode)?;
                need(!self.m_grid.is_empty(), "m_grid")?;
            }
            "square-blowup" => need(self.tiny.is_some(), "tiny")?,
            "tester-calibration" => {
                need(self.tester.is_some(), "tester")?;
                for d in &self.tester.as_ref().expect("checked").distributions {
                    super::experiments::parse_tester_distribution(d)?;
                }
            }
            "soundness" => {
                need(self.row.is_some(), "row")?;
                need(self.set_system.is_some(), "set_system")?;
                self.row.as_ref().expect("checked").resolve(self.regime_mode)?;
            }
            "average-error-probe" | "nonmonotone-demo" => {
                need(self.set_system.is_some(), "set_system")?;
                need(!self.m_grid.is_empty(), "m_grid")?;
            }
            _ => unreachable!(),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for e in EXPERIMENTS {
            let c = ExperimentConfig::preset(e).unwrap();
            let text = c.to_toml().unwrap();
            assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c, "{e}");
        }
        assert!(matches!(ExperimentConfig::preset("nope"), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn seed_is_mandatory() {
        let text = "experiment = \"separation\"\ntrials = 10\nm_grid = [5]\n[row]\nn = 100\nbig_m = 10\n";
        assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))));
        let ok = format!("seed = 1\n{text}");
        assert!(ExperimentConfig::from_toml(&ok).is_ok());
    }

    #[test]
    fn unresolved_names_fail() {
        let mut c = ExperimentConfig::preset("separation").unwrap();
        c.learners.push("perceptron".into());
        assert!(matches!(c.validate(), Err(Error::UnknownComponent(_))));
        let mut c = ExperimentConfig::preset("tester-calibration").unwrap();
        c.tester.as_mut().unwrap().distributions.push("zipf".into());
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::preset("separation").unwrap();
        c.regime_mode = RegimeMode::PaperSchedule;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn asymptotic_schedule_resolution() {
        let r = RowSpec { n: 1_000_000, big_m: None, beta: Some(0.1), m_gate: None, xi: None };
        let p = r.resolve(RegimeMode::PaperSchedule).unwrap();
        assert_eq!((p.big_m, p.m_gate), (251_189, Some(63_095)));
        let d = RowSpec { n: 100, big_m: Some(10), beta: None, m_gate: Some(7), xi: None };
        let p = d.resolve(RegimeMode::DirectParameters).unwrap();
        assert_eq!((p.big_m, p.m_gate, p.xi), (10, Some(7), 0.1));
    }
}
