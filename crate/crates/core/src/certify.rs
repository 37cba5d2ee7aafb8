//! Certifiers map an unlabeled sample to a claimed bound on a learner's
//! error. The auditor compares their expectation against measured error.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::construct::{separation_constant, RowSchedule};
use crate::distribution::DiscreteDistribution;
use crate::domain::DomainPoint;
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::learners::{worst_truth_error, Learner};
use crate::rng::RandomSource;
use crate::stats::{combined_se, monte_carlo, Estimate};
use crate::unitest::{m_test_unif, PointSet, TesterParams};

/// Audit tolerance in combined standard errors.
pub const SOUNDNESS_SIGMAS: f64 = 3.0;
/// Smallest trial count accepted by [`expected_certificate`].
pub const MIN_CERTIFICATE_TRIALS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifierDescriptor {
    pub kind: String,
    pub target: String,
    pub xi: Option<f64>,
    pub m_gate: Option<u64>,
    pub levels: Vec<f64>,
}

/// Only the unlabeled sample reaches `evaluate`, so no certifier can read labels.
pub trait Certifier: Send + Sync {
    fn descriptor(&self) -> CertifierDescriptor;
    fn evaluate(&self, s: &[DomainPoint]) -> Result<f64>;
}

/// Shared gate-then-test logic of the majority and set certifiers.
#[derive(Clone, Debug)]
struct GatedTester {
    y: PointSet,
    params: TesterParams,
    m_gate: u64,
    level: f64,
}

impl GatedTester {
    fn new(y: PointSet, xi: f64, m_gate: u64, multiple: f64) -> Result<Self> {
        // The tester runs with delta = xi.
        let params = TesterParams::new(xi, xi)?;
        Ok(Self { y, params, m_gate, level: (multiple * xi).min(1.0) })
    }

    fn evaluate(&self, s: &[DomainPoint]) -> Result<f64> {
        if (s.len() as u64) < self.m_gate {
            return Ok(1.0);
        }
        match m_test_unif(&self.y, &self.params, s) {
            Ok(out) if out.accepted => Ok(self.level),
            Ok(_) | Err(Error::SampleTooSmall { .. }) => Ok(1.0),
            Err(e) => Err(e),
        }
    }

    fn descriptor(&self, kind: &str, target: String) -> CertifierDescriptor {
        CertifierDescriptor {
            kind: kind.into(),
            target,
            xi: Some(self.params.xi),
            m_gate: Some(self.m_gate),
            levels: vec![self.level, 1.0],
        }
    }
}

/// Outputs `3ξ` when `|S| ≥ m_gate` and the modified tester accepts `S`
/// as uniform on row `n`; otherwise 1.
#[derive(Clone, Debug)]
pub struct MajorityCertifier {
    n: u32,
    inner: GatedTester,
}

impl MajorityCertifier {
    pub fn new(n: u32, xi: f64, m_gate: u64) -> Result<Self> {
        Ok(Self { n, inner: GatedTester::new(PointSet::Row(n), xi, m_gate, 3.0)? })
    }

    pub fn from_schedule(s: &RowSchedule) -> Result<Self> {
        Self::new(s.n, s.xi, s.m_gate)
    }

    pub fn level(&self) -> f64 {
        self.inner.level
    }
}

impl Certifier for MajorityCertifier {
    fn descriptor(&self) -> CertifierDescriptor {
        self.inner.descriptor("majority", format!("row {}", self.n))
    }

    fn evaluate(&self, s: &[DomainPoint]) -> Result<f64> {
        self.inner.evaluate(s)
    }
}

pub fn certifier_majority(n: u32, xi: f64, m_gate: u64, s: &[DomainPoint]) -> Result<f64> {
    MajorityCertifier::new(n, xi, m_gate)?.evaluate(s)
}

/// As [`MajorityCertifier`] against uniform on a point set, at level `6ξ`.
#[derive(Clone, Debug)]
pub struct SetCertifier {
    inner: GatedTester,
}

impl SetCertifier {
    pub fn new(points: impl IntoIterator<Item = DomainPoint>, xi: f64, m_gate: u64) -> Result<Self> {
        let y = PointSet::from_points(points);
        if y.is_empty() {
            return Err(Error::InvalidParameter("empty target set".into()));
        }
        Ok(Self { inner: GatedTester::new(y, xi, m_gate, 6.0)? })
    }

    /// `ξ = n^(-β/2)`, `m = ⌊n^(1/2 + 3β)⌋` with `n = |set|`.
    pub fn asymptotic(points: Vec<DomainPoint>, beta: f64) -> Result<Self> {
        let n = points.len() as f64;
        Self::new(points, n.powf(-beta / 2.0), n.powf(0.5 + 3.0 * beta).floor() as u64)
    }

    pub fn level(&self) -> f64 {
        self.inner.level
    }
}

impl Certifier for SetCertifier {
    fn descriptor(&self) -> CertifierDescriptor {
        self.inner.descriptor("set", format!("{} points", self.inner.y.len()))
    }

    fn evaluate(&self, s: &[DomainPoint]) -> Result<f64> {
        self.inner.evaluate(s)
    }
}

pub fn certifier_set(points: &[DomainPoint], xi: f64, m_gate: u64, t: &[DomainPoint]) -> Result<f64> {
    SetCertifier::new(points.iter().copied(), xi, m_gate)?.evaluate(t)
}

/// Error of the base learner as a function of the sample size.
pub type ErrorCurve = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// `(1 - 2c^m)·ε_A(m) + c^m` when `S` stays inside the target's support,
/// with `m = |S|`; otherwise 1.
#[derive(Clone)]
pub struct WellSeparatedCertifier {
    family: Arc<Vec<DiscreteDistribution>>,
    target: usize,
    c: f64,
    learner_error: ErrorCurve,
}

impl fmt::Debug for WellSeparatedCertifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WellSeparatedCertifier").field("target", &self.target).field("c", &self.c).finish()
    }
}

impl WellSeparatedCertifier {
    /// Fails unless every `D'[supp(D)] <= c < 1` for distinct members.
    pub fn new(family: Arc<Vec<DiscreteDistribution>>, target: usize, c: f64, learner_error: ErrorCurve) -> Result<Self> {
        if target >= family.len() {
            return Err(Error::InvalidParameter(format!("target {target} outside family of {}", family.len())));
        }
        if !(0.0..1.0).contains(&c) {
            return Err(Error::SeparationViolation(format!("c = {c} not in [0,1)")));
        }
        let actual = separation_constant(&family);
        if actual > c {
            return Err(Error::SeparationViolation(format!("family has separation {actual} > c = {c}")));
        }
        Ok(Self { family, target, c, learner_error })
    }

    pub fn value_at(&self, m: usize) -> f64 {
        let cm = self.c.powi(m as i32);
        (1.0 - 2.0 * cm) * (self.learner_error)(m) + cm
    }
}

impl Certifier for WellSeparatedCertifier {
    fn descriptor(&self) -> CertifierDescriptor {
        CertifierDescriptor {
            kind: "well-separated".into(),
            target: format!("member {}", self.target),
            xi: None,
            m_gate: None,
            levels: vec![],
        }
    }

    fn evaluate(&self, s: &[DomainPoint]) -> Result<f64> {
        let d = &self.family[self.target];
        Ok(if s.iter().all(|x| d.contains(x)) { self.value_at(s.len()) } else { 1.0 })
    }
}

pub fn certifier_wellsep(
    family: Arc<Vec<DiscreteDistribution>>,
    target: usize,
    c: f64,
    learner_error: ErrorCurve,
    s: &[DomainPoint],
) -> Result<f64> {
    WellSeparatedCertifier::new(family, target, c, learner_error)?.evaluate(s)
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantCertifier(pub f64);

impl Certifier for ConstantCertifier {
    fn descriptor(&self) -> CertifierDescriptor {
        CertifierDescriptor { kind: "constant".into(), target: "any".into(), xi: None, m_gate: None, levels: vec![self.0] }
    }

    fn evaluate(&self, _: &[DomainPoint]) -> Result<f64> {
        Ok(self.0)
    }
}

/// `E_{S ~ D^m}[C(S)]` by Monte Carlo.
pub fn expected_certificate(
    cert: &dyn Certifier,
    d: &DiscreteDistribution,
    m: usize,
    trials: usize,
    rng: &RandomSource,
) -> Result<Estimate> {
    if trials < MIN_CERTIFICATE_TRIALS {
        return Err(Error::InvalidParameter(format!("{trials} trials < {MIN_CERTIFICATE_TRIALS}")));
    }
    monte_carlo(trials, rng, |r| cert.evaluate(&d.sample_iid(m, r)))
}

#[derive(Clone, Debug)]
pub struct BatteryEntry {
    pub id: String,
    pub distribution: DiscreteDistribution,
    pub truths: Vec<Hypothesis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub distribution: String,
    pub m: usize,
    pub certificate: Estimate,
    pub error: Estimate,
    pub worst_truth: usize,
    pub tolerance: f64,
    pub sound: bool,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub certifier: CertifierDescriptor,
    pub learner: String,
    pub rows: Vec<AuditRow>,
}

impl CertificationReport {
    pub fn all_sound(&self) -> bool {
        self.rows.iter().all(|r| r.sound)
    }
}

/// `E[C] >= err - 3·sqrt(se_C² + se_err²)`.
pub fn statistically_sound(certificate: &Estimate, error: &Estimate) -> (bool, f64) {
    let tolerance = SOUNDNESS_SIGMAS * combined_se(certificate, error);
    (certificate.mean >= error.mean - tolerance, tolerance)
}

/// Cell `(i, j)` for battery entry `i` and `m_grid[j]` uses stream `rng.fork_path(&[i, j])`.
pub fn soundness_audit(
    cert: &dyn Certifier,
    learner: &dyn Learner,
    battery: &[BatteryEntry],
    m_grid: &[usize],
    trials: usize,
    rng: &RandomSource,
) -> Result<CertificationReport> {
    if battery.is_empty() {
        return Err(Error::InvalidParameter("empty battery".into()));
    }
    let mut rows = Vec::with_capacity(battery.len() * m_grid.len());
    for (i, entry) in battery.iter().enumerate() {
        for (j, &m) in m_grid.iter().enumerate() {
            let cell = rng.fork_path(&[i as u64, j as u64]);
            let certificate = expected_certificate(cert, &entry.distribution, m, trials, &cell.fork(0))?;
            let (worst_truth, error) =
                worst_truth_error(learner, &entry.distribution, &entry.truths, m, trials, &cell.fork(1))?;
            let (sound, tolerance) = statistically_sound(&certificate, &error);
            rows.push(AuditRow {
                distribution: entry.id.clone(),
                m,
                certificate,
                error,
                worst_truth,
                tolerance,
                sound,
                verdict: "statistical".into(),
            });
        }
    }
    Ok(CertificationReport { certifier: cert.descriptor(), learner: learner.name(), rows })
}
