//! Certifier audits: the majority certifier with the majority learner on the
//! row class, and the set certifier with the validation learner on a set system.

use crate::certify::CertificationReport;
use crate::error::{Error, Result};
use crate::harness::audit::{row_audit, set_audit};
use crate::harness::config::ExperimentConfig;
use crate::harness::regime::check_regime;
use crate::harness::results::ResultTable;
use crate::rng::RandomSource;

fn record(table: &mut ResultTable, rep: &CertificationReport, class: &str) {
    for r in &rep.rows {
        table.push(&format!("certificate:{}", rep.certifier.kind), class, &r.distribution, r.m, &r.certificate);
        table.push(&format!("error:{}", rep.learner), class, &r.distribution, r.m, &r.error);
        table.check(
            &format!("sound {} {} m={}", rep.certifier.kind, r.distribution, r.m),
            r.sound,
            format!(
                "certificate {:.4} vs error {:.4} (tolerance {:.4}, {})",
                r.certificate.mean, r.error.mean, r.tolerance, r.verdict
            ),
        );
    }
}

/// The expected certificate under the target marginal at the gate size lies
/// in `[level, level + xi]` up to its interval.
fn band_check(table: &mut ResultTable, rep: &CertificationReport, target: &str, gate: u64, level: f64, xi: f64) {
    let name = format!("{} certificate band", rep.certifier.kind);
    match rep.rows.iter().find(|r| r.distribution == target && r.m as u64 >= gate) {
        Some(r) => {
            let c = r.certificate;
            let ok = c.mean >= level - c.ci_half_width && c.mean <= level + xi + c.ci_half_width;
            table.check(&name, ok, format!("{:.4} in [{level:.4}, {:.4}] +/- {:.4}", c.mean, level + xi, c.ci_half_width));
        }
        None => table.check(&name, false, format!("no m >= gate {gate} in the grid")),
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let rng = RandomSource::new(cfg.seed, 0);
    let mut table = ResultTable::new(cfg, check_regime(cfg));
    let grid = &cfg.m_grid;
    let learner = |i: usize, default: &str| cfg.learners.get(i).cloned().unwrap_or_else(|| default.into());

    let r = cfg.row.as_ref().expect("validated").resolve(cfg.regime_mode)?;
    let gate = r.m_gate.ok_or_else(|| Error::Config("soundness needs row.m_gate".into()))?;
    let battery = [
        "uniform".to_string(),
        format!("perturbed:{}", r.xi / 2.0),
        format!("subset-uniform:{}", (r.n / 2).max(1)),
        "off-support:0.5".to_string(),
    ];
    let (cert, rep) = row_audit(&r, &learner(0, "majority"), &battery, grid, cfg.trials, &rng.fork(0))?;
    record(&mut table, &rep, &format!("row n={} M={}", r.n, r.big_m));
    band_check(&mut table, &rep, "uniform", gate, cert.level(), r.xi);

    let spec = cfg.set_system.as_ref().expect("validated");
    let xi = spec.xi.ok_or_else(|| Error::Config("soundness needs set_system.xi".into()))?;
    let sgate = spec.m_gate.ok_or_else(|| Error::Config("soundness needs set_system.m_gate".into()))?;
    let battery = ["set:0".to_string(), "set:1".to_string(), "half-set:0".to_string(), format!("perturbed-set:{}", xi / 2.0)];
    let (cert, rep) = set_audit(spec, &learner(1, "validation"), &battery, grid, cfg.trials, &rng.fork(1))?;
    record(&mut table, &rep, &format!("set-system U={} n={} k={}", spec.universe, spec.n, spec.k));
    band_check(&mut table, &rep, "set:0", sgate, cert.level(), xi);
    Ok(table)
}
