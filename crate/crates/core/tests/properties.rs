use proptest::prelude::*;

use relsmart_core::certify::{certifier_majority, certifier_set};
use relsmart_core::construct::RowClass;
use relsmart_core::distribution::{conditional_distribution, gamma_no_duplicates};
use relsmart_core::hypothesis::HypothesisClass;
use relsmart_core::learners::majority_train;
use relsmart_core::oig::{
    build_one_inclusion_graph, densest_subgraph_exhaustive, min_max_fractional_orientation, oig_transductive_error,
    parity_orientation, BehaviorSet,
};
use relsmart_core::oracle::best_transductive_value;
use relsmart_core::unitest::{collision_statistic, test_unif_with_threshold};
use relsmart_core::{tv_distance, DiscreteDistribution, DomainPoint, FiniteClass, LabeledExample};

fn flat(i: u64) -> DomainPoint {
    DomainPoint::flat(i)
}

/// Positive weights on points `0..k`, zeros dropped.
fn dist(weights: &[u32]) -> DiscreteDistribution {
    let w: Vec<_> = weights.iter().enumerate().filter(|(_, &w)| w > 0).map(|(i, &w)| (flat(i as u64), f64::from(w))).collect();
    DiscreteDistribution::from_weights(w).unwrap()
}

fn weights() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..5, 6).prop_filter("some mass", |v| v.iter().any(|&w| w > 0))
}

/// Distinct rows of a random subset of the `n`-cube.
fn cube_subset(max_n: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::btree_set(0u32..(1 << n), 1..=(1usize << n).min(16))
            .prop_map(move |s| s.into_iter().map(|c| (0..n).map(|i| c >> i & 1 == 1).collect()).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tv_is_a_metric(a in weights(), b in weights(), c in weights()) {
        let (a, b, c) = (dist(&a), dist(&b), dist(&c));
        prop_assert!((tv_distance(&a, &b) - tv_distance(&b, &a)).abs() < 1e-12);
        prop_assert!(tv_distance(&a, &a) < 1e-12);
        prop_assert!(tv_distance(&a, &c) <= tv_distance(&a, &b) + tv_distance(&b, &c) + 1e-12);
        if tv_distance(&a, &b) < 1e-12 {
            prop_assert!(a.support().iter().all(|(x, p)| (b.mass(x) - p).abs() < 1e-9));
        }
    }

    #[test]
    fn conditioning_moves_tv_by_at_most_outside_mass(d in weights(), e in weights(), keep in prop::collection::vec(any::<bool>(), 6)) {
        let (d, e) = (dist(&d), dist(&e));
        let ys: Vec<_> = (0..6).filter(|&i| keep[i as usize]).map(flat).collect();
        prop_assume!(d.mass_of(&ys) > 0.0);
        let cond = conditional_distribution(&d, &ys).unwrap();
        let outside = 1.0 - d.mass_of(&ys);
        prop_assert!(tv_distance(&cond, &e) >= tv_distance(&d, &e) - outside - 1e-12);
    }

    #[test]
    fn majority_ignores_order(labels in prop::collection::vec(any::<bool>(), 0..20), seed in any::<u64>()) {
        let t: Vec<_> = labels.iter().enumerate().map(|(i, &y)| LabeledExample::new(flat(i as u64), y)).collect();
        let mut u = t.clone();
        let mut rng = relsmart_core::RandomSource::new(seed, 0);
        rand::seq::SliceRandom::shuffle(u.as_mut_slice(), &mut rng);
        prop_assert_eq!(majority_train(&t).0, majority_train(&u).0);
    }

    #[test]
    fn row_consistency_matches_enumeration(
        n in 2u32..=12,
        big_m in 1u32..=3,
        picks in prop::collection::vec((1u32..=12, any::<bool>()), 0..8),
    ) {
        prop_assume!(2 * big_m <= n);
        let class = RowClass::new(n, big_m).unwrap();
        let members = class.members().unwrap();
        let t: Vec<_> = picks
            .iter()
            .map(|&(c, y)| LabeledExample::new(DomainPoint::row(n, (c - 1) % n + 1).unwrap(), y))
            .collect();
        prop_assert_eq!(class.is_consistent(&t), members.iter().any(|h| h.agrees_with(&t)));
    }

    #[test]
    fn orientation_value_is_max_density(rows in cube_subset(4)) {
        let g = build_one_inclusion_graph(&BehaviorSet::from_bits(rows).unwrap());
        let o = min_max_fractional_orientation(&g).unwrap();
        prop_assert!(o.is_valid(&g));
        prop_assert!((o.value - densest_subgraph_exhaustive(&g)).abs() < 1e-6);
    }

    #[test]
    fn transductive_solvers_agree(rows in cube_subset(4)) {
        let n = rows[0].len();
        let domain: Vec<_> = (0..n as u64).map(flat).collect();
        let class = FiniteClass::from_bits("p", &domain, &rows);
        let a = oig_transductive_error(&class, &domain, 1 << 10).unwrap();
        let b = best_transductive_value(&class, &domain).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn collision_statistic_ignores_order_within_block(xs in prop::collection::vec(0u64..8, 2..40), seed in any::<u64>()) {
        let block: Vec<_> = xs.iter().copied().map(flat).collect();
        let mut shuffled = block.clone();
        let mut rng = relsmart_core::RandomSource::new(seed, 0);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        prop_assert_eq!(collision_statistic(&block).unwrap(), collision_statistic(&shuffled).unwrap());
    }

    #[test]
    fn raising_threshold_only_adds_acceptances(xs in prop::collection::vec(0u64..6, 12..80), lo in 0.0f64..0.5, step in 0.0f64..0.5) {
        let s: Vec<_> = xs.iter().copied().map(flat).collect();
        let a = test_unif_with_threshold(4, lo, &s).unwrap();
        let b = test_unif_with_threshold(4, lo + step, &s).unwrap();
        prop_assert!(a.sub_decisions.iter().zip(&b.sub_decisions).all(|(&x, &y)| !x || y));
        prop_assert!(!a.accepted || b.accepted);
    }

    #[test]
    fn certifiers_take_two_values(cols in prop::collection::vec(1u32..=20, 0..300), gate in 0u64..300) {
        let s: Vec<_> = cols.iter().map(|&c| DomainPoint::row(20, c).unwrap()).collect();
        let v = certifier_majority(20, 0.1, gate, &s).unwrap();
        prop_assert!(v == 1.0 || (v - 0.3).abs() < 1e-12, "{}", v);
        let pts: Vec<_> = (1..=20).map(|c| DomainPoint::row(20, c).unwrap()).collect();
        let w = certifier_set(&pts, 0.1, gate, &s).unwrap();
        prop_assert!(w == 1.0 || (w - 0.6).abs() < 1e-12, "{}", w);
    }
}

#[test]
fn gamma_sandwich_on_grid() {
    for c in [3.0f64, 5.0, 10.0] {
        for m in 3u64..=10 {
            let g = gamma_no_duplicates(m, (c * (m * m) as f64) as u64);
            assert!(1.0 - 1.0 / c <= g && g <= (-1.0 / (3.0 * c)).exp(), "m={m} c={c}: {g}");
        }
    }
}

#[test]
fn parity_degrees_are_balanced() {
    for n in 1..=10usize {
        let (g, o) = parity_orientation(n).unwrap();
        assert!(o.is_valid(&g));
        assert!(o.masses.iter().all(|&(a, b)| (a == 0.0 && b == 1.0) || (a == 1.0 && b == 0.0)));
        assert!(o.out_degree.iter().all(|&d| d == (n / 2) as f64 || d == n.div_ceil(2) as f64), "n={n}");
    }
}

#[test]
fn certificate_is_label_free() {
    // The certifier signature only admits unlabeled points; two labelings of
    // one sample therefore reduce to the same input.
    let s: Vec<_> = (0..50u32).map(|i| DomainPoint::row(10, i % 10 + 1).unwrap()).collect();
    let a: Vec<_> = s.iter().map(|&x| LabeledExample::new(x, true)).collect();
    let b: Vec<_> = s.iter().map(|&x| LabeledExample::new(x, false)).collect();
    let ua = relsmart_core::domain::unlabeled(&a);
    let ub = relsmart_core::domain::unlabeled(&b);
    assert_eq!(certifier_majority(10, 0.2, 10, &ua).unwrap(), certifier_majority(10, 0.2, 10, &ub).unwrap());
}
