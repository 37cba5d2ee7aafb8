use super::parse_tester_distribution;
use crate::distribution::tv_distance;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::regime::check_regime;
use crate::harness::results::ResultTable;
use crate::rng::RandomSource;
use crate::stats::monte_carlo;
use crate::unitest::{m_test_sample_bound, m_test_unif, PointSet, TesterParams};

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let spec = cfg.tester.as_ref().expect("validated");
    let params = TesterParams::new(spec.xi, spec.delta)?;
    let size = spec.sample_size.unwrap_or_else(|| m_test_sample_bound(u64::from(spec.n), spec.xi / 2.0, spec.delta)) as usize;
    let y = PointSet::Row(spec.n);
    let uniform = y.uniform()?;
    let rng = RandomSource::new(cfg.seed, 0);
    let mut table = ResultTable::new(cfg, check_regime(cfg));
    let label = format!("row n={}", spec.n);
    let target = cfg.threshold("rate_min", 1.0 - spec.delta);

    for (i, name) in spec.distributions.iter().enumerate() {
        let d = parse_tester_distribution(name)?.build(spec.n)?;
        let e = monte_carlo(cfg.trials, &rng.fork(i as u64), |r| {
            Ok(if m_test_unif(&y, &params, &d.sample_iid(size, r))?.accepted { 1.0 } else { 0.0 })
        })?;
        table.push("acceptance-rate", &label, name, size, &e);
        let tv = tv_distance(&d, &uniform);
        let tol = cfg.sigmas * e.std_error;
        if tv == 0.0 {
            table.check(
                &format!("accepts {name}"),
                e.mean >= target - tol,
                format!("acceptance {:.3} >= {target} - {tol:.3}", e.mean),
            );
        } else if tv > spec.xi {
            table.check(
                &format!("rejects {name}"),
                1.0 - e.mean >= target - tol,
                format!("rejection {:.3} >= {target} - {tol:.3} (tv {tv:.3})", 1.0 - e.mean),
            );
        }
    }
    Ok(table)
}
