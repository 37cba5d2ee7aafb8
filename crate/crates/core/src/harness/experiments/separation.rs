//! Majority against adversarial ERM and OIG on the row class, below the
//! minority size where every in-row sample is shattered.

use std::sync::Arc;

use super::{estimate_error_rate, resolve_learner, LearnerContext};
use crate::construct::RowClass;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::regime::check_regime;
use crate::harness::results::ResultTable;
use crate::rng::RandomSource;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let r = cfg.row.as_ref().expect("validated").resolve(cfg.regime_mode)?;
    let class = Arc::new(RowClass::new(r.n, r.big_m)?);
    let d = Arc::new(class.distribution());
    // Every hypothesis with a given majority label is equivalent under D(n).
    let truth = class.canonical(true);
    let mut ctx = LearnerContext::new(class.clone());
    ctx.truth = Some(truth.clone());
    ctx.distribution = Some(d.clone());

    let rng = RandomSource::new(cfg.seed, 0);
    let mut table = ResultTable::new(cfg, check_regime(cfg));
    let label = format!("row n={} M={}", r.n, r.big_m);
    let sig = cfg.sigmas;
    for (j, &m) in cfg.m_grid.iter().enumerate() {
        for (i, name) in cfg.learners.iter().enumerate() {
            let learner = resolve_learner(name, &ctx)?;
            let row = estimate_error_rate(
                learner.as_ref(),
                &d,
                "D(n)",
                std::slice::from_ref(&truth),
                m,
                cfg.trials,
                &rng.fork_path(&[j as u64, i as u64]),
            )?;
            let e = row.estimate;
            table.push(&format!("error:{name}"), &label, "D(n)", m, &e);
            let tol = sig * e.std_error;
            match name.as_str() {
                "majority" => {
                    let bound = cfg.threshold("majority_max", 0.03);
                    table.check(
                        &format!("majority-upper m={m}"),
                        e.mean <= bound + tol,
                        format!("{:.4} <= {bound} + {tol:.4}", e.mean),
                    );
                }
                "erm-adversarial" => {
                    let bound = cfg.threshold("erm_min", 0.95);
                    table.check(
                        &format!("erm-lower m={m}"),
                        e.mean >= bound - tol,
                        format!("{:.4} >= {bound} - {tol:.4}", e.mean),
                    );
                }
                "oig" => {
                    let (lo, hi) = (cfg.threshold("oig_low", 0.45), cfg.threshold("oig_high", 0.55));
                    table.check(
                        &format!("oig-band m={m}"),
                        e.mean >= lo - tol && e.mean <= hi + tol,
                        format!("{:.4} in [{lo}, {hi}] +/- {tol:.4}", e.mean),
                    );
                }
                _ => {}
            }
        }
    }
    Ok(table)
}
