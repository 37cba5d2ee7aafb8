//! Three nested marginal families on one set system: the single target
//! marginal, the well-separated family of set marginals, and all marginals.
//! Reports certificates next to learner errors; asserts nothing about them.

use std::sync::Arc;

use super::{average, build_set_system, resolve_learner, LearnerContext};
use crate::certify::{expected_certificate, MIN_CERTIFICATE_TRIALS, ErrorCurve, SetCertifier, WellSeparatedCertifier};
use crate::construct::{sample_labelings, wellsep_family_from_setsystem};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::regime::check_regime;
use crate::harness::results::ResultTable;
use crate::learners::{learner_error, worst_truth_error, Erm, TieBreakPolicy, ValidationLearner};
use crate::rng::RandomSource;
use crate::stats::Estimate;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let spec = cfg.set_system.as_ref().expect("validated");
    let rng = RandomSource::new(cfg.seed, 0);
    let mut table = ResultTable::new(cfg, check_regime(cfg));
    let system = build_set_system(spec, &rng.fork(0))?;
    let class = Arc::new(sample_labelings(&system, &mut rng.fork(1)));
    let members: Vec<_> = (0..system.len()).map(|i| class.hypothesis(i).clone()).collect();
    let (family, c) = wellsep_family_from_setsystem(&system)?;
    table.check("family well separated", c < 1.0, format!("c = {c}"));
    let family = Arc::new(family);
    let label = format!("set-system U={} n={} k={}", spec.universe, spec.n, spec.k);
    let ctx = LearnerContext::new(class.clone());
    let erm = Erm { class: class.clone(), policy: TieBreakPolicy::LexicographicFirst };
    let fixed = ValidationLearner { reference: members[0].clone() };
    let xi = spec.xi.ok_or_else(|| Error::Config("nonmonotone-demo needs set_system.xi".into()))?;
    let gate = spec.m_gate.ok_or_else(|| Error::Config("nonmonotone-demo needs set_system.m_gate".into()))?;
    let set_cert = SetCertifier::new(system.points(0), xi, gate)?;
    let trials = cfg.trials.max(MIN_CERTIFICATE_TRIALS);

    for (j, &m) in cfg.m_grid.iter().enumerate() {
        let cell = rng.fork_path(&[2, j as u64]);

        // Family 1: a learner built for D_S0 certifies its own worst-case error.
        let (_, own) = worst_truth_error(&fixed, &family[0], &members, m, trials, &cell.fork(0))?;
        table.push("D1:error:validation", &label, "D_S0", m, &own);
        table.push("D1:certificate:constant", &label, "D_S0", m, &Estimate::exact(own.mean));

        // Family 2: the well-separated certifier over ERM's error curve at the target.
        let (_, base) = worst_truth_error(&erm, &family[0], &members, m, trials, &cell.fork(1))?;
        let at = base.mean;
        let curve: ErrorCurve = Arc::new(move |_| at);
        let ws = WellSeparatedCertifier::new(family.clone(), 0, c, curve)?;
        table.push("D2:certificate:well-separated", &label, "D_S0", m, &Estimate::exact(ws.value_at(m)));
        for (l, name) in cfg.learners.iter().enumerate() {
            let learner = resolve_learner(name, &ctx)?;
            let per_set = (0..family.len())
                .map(|i| learner_error(learner.as_ref(), &family[i], &members[i], m, trials, &cell.fork_path(&[2, l as u64, i as u64])))
                .collect::<Result<Vec<_>>>()?;
            table.push(&format!("D2:average-error:{name}"), &label, "D_S family", m, &average(&per_set));
        }

        // Family 3: only the gated set certifier remains.
        let cert = expected_certificate(&set_cert, &family[0], m, trials, &cell.fork(3))?;
        table.push("D3:certificate:set", &label, "D_S0", m, &cert);
        let oig = resolve_learner("oig", &ctx)?;
        let e = learner_error(oig.as_ref(), &family[0], &members[0], m, trials, &cell.fork(4))?;
        table.push("D3:error:oig", &label, "D_S0", m, &e);
    }
    Ok(table)
}
