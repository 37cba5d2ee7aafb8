//! The square-blowup chain on tiny instances: sampled OIG error at `M-1`
//! against `e` times the expected optimal error on empirical marginals, and
//! the sandwich bounds on the no-duplicate probability.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use crate::distribution::{gamma_no_duplicates, DiscreteDistribution};
use crate::domain::DomainPoint;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::regime::check_regime;
use crate::harness::results::ResultTable;
use crate::hypothesis::{bits_to_string, FiniteClass, HypothesisClass};
use crate::learners::worst_truth_error;
use crate::oig::OigLearner;
use crate::oracle::{expected_empirical_optimal_error, GameInstance};
use crate::rng::RandomSource;
use crate::stats::Estimate;

pub(crate) struct TinyInstance {
    pub domain: Vec<DomainPoint>,
    pub class: Vec<Vec<bool>>,
    pub distribution: DiscreteDistribution,
    pub big_m: usize,
}

pub(crate) fn random_instance(max_domain: usize, max_class: usize, big_ms: &[usize], r: &mut RandomSource) -> Result<TinyInstance> {
    let n = r.random_range(1..=max_domain);
    let domain: Vec<DomainPoint> = (0..n as u64).map(DomainPoint::flat).collect();
    let cube = 1usize << n;
    let size = r.random_range(1..=max_class.min(cube));
    let mut codes = sample(r, cube, size).into_vec();
    codes.sort_unstable();
    let class = codes.iter().map(|c| (0..n).map(|i| (c >> (n - 1 - i)) & 1 == 1).collect()).collect();
    let k = r.random_range(1..=n);
    let mut supp = sample(r, n, k).into_vec();
    supp.sort_unstable();
    let weights = supp.iter().map(|&i| (domain[i], f64::from(r.random_range(1..=4u32)))).collect();
    let big_m = big_ms[r.random_range(0..big_ms.len())];
    Ok(TinyInstance { domain, class, distribution: DiscreteDistribution::from_weights(weights)?, big_m })
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let spec = cfg.tiny.as_ref().expect("validated");
    let rng = RandomSource::new(cfg.seed, 0);
    let mut table = ResultTable::new(cfg, check_regime(cfg));
    let e = std::f64::consts::E;

    for i in 0..spec.instances {
        let inst = random_instance(spec.max_domain, spec.max_class, &spec.big_m, &mut rng.fork_path(&[0, i as u64]))?;
        let game = GameInstance::new(inst.domain.clone(), inst.class.clone(), inst.distribution.clone(), 0)?;
        let rhs = e * expected_empirical_optimal_error(&game, inst.big_m)?;

        let class = FiniteClass::from_bits(format!("tiny-{i}"), &inst.domain, &inst.class);
        let truths = class.members().expect("finite");
        let learner = OigLearner::new(Arc::new(class));
        let m = inst.big_m - 1;
        let (_, lhs) = worst_truth_error(&learner, &inst.distribution, &truths, m, cfg.trials, &rng.fork_path(&[1, i as u64]))?;

        let label = format!(
            "tiny-{i} X={} H={}",
            inst.domain.len(),
            inst.class.iter().map(|h| bits_to_string(h)).collect::<Vec<_>>().join("|")
        );
        let dist = format!(
            "D({})",
            inst.distribution.support().iter().map(|(x, p)| format!("{x}:{p:.4}")).collect::<Vec<_>>().join(" ")
        );
        table.push("oig-error", &label, &dist, m, &lhs);
        table.push("e-optimal-empirical", &label, &dist, m, &Estimate::exact(rhs));
        let tol = cfg.sigmas * lhs.std_error;
        table.check(
            &format!("square-blowup tiny-{i}"),
            lhs.mean <= rhs + tol,
            format!("{:.4} <= {rhs:.4} + {tol:.4} (M={})", lhs.mean, inst.big_m),
        );
    }

    let mut sandwich = true;
    let mut detail = String::new();
    for &c in &spec.gamma_c {
        for &m in &spec.gamma_m {
            let big_m = (c * (m * m) as f64).round() as u64;
            let g = gamma_no_duplicates(m, big_m);
            let (lo, hi) = (1.0 - 1.0 / c, (-1.0 / (3.0 * c)).exp());
            table.push("gamma", &format!("c={c}"), &format!("uniform on {big_m}"), m as usize, &Estimate::exact(g));
            if !(lo <= g && g <= hi) {
                sandwich = false;
                detail.push_str(&format!("m={m} c={c}: {g} not in [{lo}, {hi}]; "));
            }
        }
    }
    table.check("gamma-sandwich", sandwich, if sandwich { "all grid points".into() } else { detail });
    Ok(table)
}
