use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, RegimeMode};
use crate::unitest::m_test_sample_bound;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub name: String,
    pub inequality: String,
    pub left: f64,
    pub right: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub rows: Vec<RegimeRow>,
}

impl RegimeReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

fn row(name: &str, inequality: &str, left: f64, right: f64, strict: bool) -> RegimeRow {
    RegimeRow {
        name: name.into(),
        inequality: inequality.into(),
        left,
        right,
        holds: if strict { left > right } else { left >= right },
    }
}

/// Preconditions of the majority and tester lemmas under the row schedule
/// `M = ⌈n^(1-β)⌉`, `m = ⌊n^(1/2+3β)⌋`, `ξ = M/n`. Informational only.
pub fn regime_rows(n: u32, big_m: u32, m: u64, xi: f64) -> RegimeReport {
    let (nf, mf) = (f64::from(n), m as f64);
    let log2xi = (2.0 / xi).ln();
    RegimeReport {
        rows: vec![
            row("tester-sample-size", "m(n) >= m_Test(n, xi, xi)", mf, m_test_sample_bound(u64::from(n), xi, xi) as f64, false),
            row("majority-n", "n > ln(2/xi) / (2 xi (1/2 - xi)^2)", nf, log2xi / (2.0 * xi * (0.5 - xi).powi(2)), true),
            row("majority-m", "m(n) >= ln(2/xi) / (2 (1/2 - xi)^2)", mf, log2xi / (2.0 * (0.5 - xi).powi(2)), false),
            row("far-majority-m", "m(n) >= ln(16/(1+2xi)) / (2 xi^2)", mf, (16.0 / (1.0 + 2.0 * xi)).ln() / (2.0 * xi * xi), false),
            row("below-minority-size", "M(n) >= m(n)", f64::from(big_m), mf, false),
        ],
    }
}

/// Empty in direct-parameter mode.
pub fn check_regime(cfg: &ExperimentConfig) -> RegimeReport {
    if cfg.regime_mode != RegimeMode::PaperSchedule {
        return RegimeReport::default();
    }
    match cfg.row.as_ref().and_then(|r| r.resolve(cfg.regime_mode).ok()) {
        Some(r) => regime_rows(r.n, r.big_m, r.m_gate.unwrap_or(0), r.xi),
        None => RegimeReport::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::RowSpec;

    #[test]
    fn million_point_row() {
        let mut cfg = ExperimentConfig::preset("separation").unwrap();
        cfg.regime_mode = RegimeMode::PaperSchedule;
        cfg.row = Some(RowSpec { n: 1_000_000, big_m: None, beta: Some(0.1), m_gate: None, xi: None });
        let rep = check_regime(&cfg);
        let t = &rep.rows[0];
        assert_eq!(t.left, 63_095.0);
        assert!((t.right / 3.79e7 - 1.0).abs() < 0.01, "{}", t.right);
        assert!(!t.holds);
        assert!(rep.rows[1..].iter().all(|r| r.holds));
        assert!(!rep.all_hold());
    }

    #[test]
    fn majority_threshold_at_ten_thousand() {
        let rep = regime_rows(10_000, 100, 50, 0.01);
        let r = &rep.rows[1];
        let expected = (200f64).ln() / (2.0 * 0.01 * 0.49f64.powi(2));
        assert!((r.right - expected).abs() < 1e-9 && (r.right - 1103.4).abs() < 0.5);
        assert!(r.holds);
    }

    #[test]
    fn direct_mode_is_empty() {
        assert!(check_regime(&ExperimentConfig::preset("separation").unwrap()).rows.is_empty());
    }
}
