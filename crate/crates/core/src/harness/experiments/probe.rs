//! Average error over the uniform marginals of a set system, at sample
//! sizes far below what the set certifier needs.

use std::sync::Arc;

use super::{average, build_set_system, resolve_learner, LearnerContext};
use crate::construct::sample_labelings;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::regime::check_regime;
use crate::harness::results::ResultTable;
use crate::learners::learner_error;
use crate::rng::RandomSource;
use crate::stats::Estimate;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let spec = cfg.set_system.as_ref().expect("validated");
    let rng = RandomSource::new(cfg.seed, 0);
    let mut table = ResultTable::new(cfg, check_regime(cfg));
    let system = build_set_system(spec, &rng.fork(0))?;
    table.check(
        "set-system verified",
        system.max_intersection() <= spec.intersection,
        format!("max intersection {} <= {}", system.max_intersection(), spec.intersection),
    );
    let class = Arc::new(sample_labelings(&system, &mut rng.fork(1)));
    let ctx = LearnerContext::new(class.clone());
    let label = format!("set-system U={} n={} k={}", spec.universe, spec.n, spec.k);
    let bound = cfg.threshold("average_min", 0.4);

    for (l, name) in cfg.learners.iter().enumerate() {
        let learner = resolve_learner(name, &ctx)?;
        for (j, &m) in cfg.m_grid.iter().enumerate() {
            let per_set = (0..system.len())
                .map(|i| {
                    learner_error(
                        learner.as_ref(),
                        &system.uniform_on(i),
                        class.hypothesis(i),
                        m,
                        cfg.trials,
                        &rng.fork_path(&[2, l as u64, j as u64, i as u64]),
                    )
                })
                .collect::<Result<Vec<Estimate>>>()?;
            let avg = average(&per_set);
            table.push(&format!("average-error:{name}"), &label, "D_S average", m, &avg);
            let tol = cfg.sigmas * avg.std_error;
            table.check(
                &format!("average {name} m={m}"),
                avg.mean >= bound - tol,
                format!("{:.4} >= {bound} - {tol:.4}", avg.mean),
            );
        }
    }
    Ok(table)
}
