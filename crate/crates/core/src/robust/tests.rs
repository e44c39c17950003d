use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::choice::{all_rank_lists, exact_marginals, ObservationScheme, RankList, SchemeKind, SparseChoiceModel};
use crate::models::{MnlModel, TransactionCounts};

fn random_model(n: usize, k: usize, rng: &mut ChaCha8Rng) -> SparseChoiceModel {
    let atoms: Vec<(RankList, f64)> = (0..k)
        .map(|_| (RankList::random(n, rng).unwrap(), rng.random_range(0.05..1.0)))
        .collect();
    SparseChoiceModel::from_weights(atoms).unwrap()
}

fn random_target(n: usize, rng: &mut ChaCha8Rng) -> Assortment {
    loop {
        let a = Assortment::new((1..n).filter(|_| rng.random_bool(0.5)));
        if a.size() > 0 {
            return a;
        }
    }
}

fn random_prices(n: usize, rng: &mut ChaCha8Rng) -> PriceVector {
    let rest: Vec<f64> = (1..n).map(|_| rng.random_range(0.5..2.0)).collect();
    PriceVector::from_products(&rest).unwrap()
}

fn query(model: &SparseChoiceModel, scheme: ObservationScheme, target: Assortment, prices: PriceVector) -> RobustQuery {
    let y = exact_marginals(model, &scheme).unwrap();
    RobustQuery::min(y, target, prices).unwrap()
}

fn at_least(q: &RobustQuery) -> RobustQuery {
    RobustQuery {
        mode: ConstraintMode::AtLeast,
        ..q.clone()
    }
}

fn check_certificate(q: &RobustQuery, res: &RobustResult) {
    let cert = res.certificate.as_ref().unwrap();
    assert!((cert.value() - res.bound).abs() < 1e-7, "{} vs {}", cert.value(), res.bound);
    let all = all_rank_lists(q.n()).unwrap();
    assert!(cert.violation(q, &all) < 1e-7, "violation {}", cert.violation(q, &all));
}

#[test]
fn uniform_ranking_two_member_target() {
    // Uniform position marginals are also matched by the three cyclic shifts
    // of 0 > 1 > 2, under which 1 beats 0 only once.
    let model = SparseChoiceModel::uniform(3).unwrap();
    let prices = PriceVector::new(vec![0.0, 1.0, 0.0]).unwrap();
    let q = query(&model, ObservationScheme::ranking(3).unwrap(), Assortment::new([1]), prices);
    let brute = robust_bruteforce(&q).unwrap();
    let exact = robust_ranking_exact(&q).unwrap();
    assert!((brute.bound - 1.0 / 3.0).abs() < 1e-9);
    assert!((exact.bound - 1.0 / 3.0).abs() < 1e-9);
    let cyclic = SparseChoiceModel::from_weights(
        [[0, 1, 2], [1, 2, 0], [2, 0, 1]].map(|o| (RankList::from_order(&o).unwrap(), 1.0)),
    )
    .unwrap();
    assert!(data_violation(&q, &cyclic).unwrap() < 1e-12);
    assert!((cyclic.revenue(&q.target, &q.prices).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let hi = robust_bruteforce(&q.with_sense(Sense::Max)).unwrap().bound;
    assert!((hi - 2.0 / 3.0).abs() < 1e-9);
    check_certificate(&q, &exact);
}

#[test]
fn no_purchase_target_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = random_model(4, 5, &mut rng);
    let prices = random_prices(4, &mut rng);
    let target = Assortment::empty();
    for scheme in [
        ObservationScheme::comparison(4).unwrap(),
        ObservationScheme::censored_comparison(4).unwrap(),
        ObservationScheme::ranking(4).unwrap(),
    ] {
        let q = query(&model, scheme.clone(), target.clone(), prices.clone());
        assert!(robust_bruteforce(&q).unwrap().bound.abs() < 1e-9);
        match scheme.kind() {
            SchemeKind::Ranking => assert!(robust_ranking_exact(&q).unwrap().bound.abs() < 1e-9),
            SchemeKind::CensoredComparison => {
                assert!(robust_censored_comparison(&at_least(&q)).unwrap().bound.abs() < 1e-9);
                assert!(robust_cutting_plane(&q, 3).unwrap().bound.abs() < 1e-9);
            }
            _ => assert!(robust_cutting_plane(&q, 3).unwrap().bound.abs() < 1e-9),
        }
    }
}

#[test]
fn deterministic_ranking_data_pins_revenue() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let sigma = RankList::random(5, &mut rng).unwrap();
        let model = SparseChoiceModel::deterministic(sigma);
        let target = random_target(5, &mut rng);
        let prices = random_prices(5, &mut rng);
        let truth = model.revenue(&target, &prices).unwrap();
        let q = query(&model, ObservationScheme::ranking(5).unwrap(), target, prices);
        for sense in [Sense::Min, Sense::Max] {
            let q = q.with_sense(sense);
            assert!((robust_bruteforce(&q).unwrap().bound - truth).abs() < 1e-9);
            assert!((robust_ranking_exact(&q).unwrap().bound - truth).abs() < 1e-7);
        }
    }
}

#[test]
fn brute_witness_is_feasible_and_sparse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let model = random_model(4, 6, &mut rng);
        let q = query(
            &model,
            ObservationScheme::censored_comparison(4).unwrap(),
            random_target(4, &mut rng),
            random_prices(4, &mut rng),
        );
        let res = robust_bruteforce(&q).unwrap();
        let w = res.witness.as_ref().unwrap();
        assert!(data_violation(&q, w).unwrap() < 1e-6);
        assert!((w.revenue(&q.target, &q.prices).unwrap() - res.bound).abs() < 1e-6);
        assert!(res.support.unwrap() <= q.data.m() + 1);
        check_certificate(&q, &res);
    }
}

#[test]
fn inconsistent_data_is_infeasible() {
    let scheme = ObservationScheme::comparison(3).unwrap();
    // Everyone prefers 0 to 1 and 1 to 0 at once.
    let values = vec![1.0; scheme.m()];
    let q = RobustQuery::min(DataVector::new(scheme, values).unwrap(), Assortment::full(3), PriceVector::unit(3)).unwrap();
    assert!(matches!(robust_bruteforce(&q), Err(Error::Infeasible(_))));
    assert!(matches!(robust_cutting_plane(&q, 2), Err(Error::Infeasible(_))));
}

#[test]
fn ranking_exact_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..15 {
        let model = random_model(5, rng.random_range(1..12), &mut rng);
        let q = query(
            &model,
            ObservationScheme::ranking(5).unwrap(),
            random_target(5, &mut rng),
            random_prices(5, &mut rng),
        );
        for sense in [Sense::Min, Sense::Max] {
            let q = q.with_sense(sense);
            let b = robust_bruteforce(&q).unwrap().bound;
            let r = robust_ranking_exact(&q).unwrap();
            assert!((b - r.bound).abs() < 1e-6, "{b} vs {}", r.bound);
            check_certificate(&q, &r);
        }
    }
}

#[test]
fn cutting_plane_exact_at_four_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let model = random_model(4, rng.random_range(2..10), &mut rng);
        let q = query(
            &model,
            ObservationScheme::comparison(4).unwrap(),
            random_target(4, &mut rng),
            random_prices(4, &mut rng),
        );
        let b = robust_bruteforce(&q).unwrap().bound;
        let c = robust_cutting_plane(&q, 1).unwrap();
        assert!((b - c.rounds[0]).abs() < 1e-6, "{b} vs {}", c.rounds[0]);
    }
}

#[test]
fn cutting_plane_rounds_are_monotone_lower_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let schemes = |n: usize, rng: &mut ChaCha8Rng| {
        let list: Vec<Assortment> = (0..4).map(|_| random_target(n, rng)).collect();
        vec![
            ObservationScheme::comparison(n).unwrap(),
            ObservationScheme::top_set(n).unwrap(),
            ObservationScheme::censored_comparison(n).unwrap(),
            ObservationScheme::transaction(n, list).unwrap(),
        ]
    };
    for _ in 0..3 {
        let model = random_model(5, rng.random_range(3..10), &mut rng);
        let target = random_target(5, &mut rng);
        let prices = random_prices(5, &mut rng);
        let truth = model.revenue(&target, &prices).unwrap();
        for scheme in schemes(5, &mut rng) {
            let q = query(&model, scheme, target.clone(), prices.clone());
            let b = robust_bruteforce(&q).unwrap().bound;
            let c = robust_cutting_plane(&q, 4).unwrap();
            for w in c.rounds.windows(2) {
                assert!(w[1] >= w[0] - 1e-7, "{:?}", c.rounds);
            }
            for r in &c.rounds {
                assert!(*r <= b + 1e-6);
            }
            if c.status == RobustStatus::Exact {
                assert!((c.bound - b).abs() < 1e-6);
            }
            let hi = robust_cutting_plane(&q.with_sense(Sense::Max), 4).unwrap();
            assert!(c.bound <= truth + 1e-6 && truth <= hi.bound + 1e-6);
        }
    }
}

#[test]
fn censored_lp_is_a_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let model = random_model(5, rng.random_range(2..10), &mut rng);
        let target = random_target(5, &mut rng);
        let prices = random_prices(5, &mut rng);
        let truth = model.revenue(&target, &prices).unwrap();
        let q = query(&model, ObservationScheme::censored_comparison(5).unwrap(), target, prices);
        let b = robust_bruteforce(&q).unwrap().bound;
        let c = robust_censored_comparison(&at_least(&q)).unwrap();
        assert!(c.bound <= b + 1e-6 && c.bound <= truth + 1e-6);
        let cert = c.certificate.unwrap();
        assert!(cert.alpha.iter().all(|a| *a >= -1e-9));
        assert!((cert.value() - c.bound).abs() < 1e-7);
        assert!(cert.groups.iter().any(|(name, _)| name.starts_with("omega2")));
    }
    let q = query(
        &SparseChoiceModel::uniform(4).unwrap(),
        ObservationScheme::censored_comparison(4).unwrap(),
        Assortment::full(4),
        PriceVector::unit(4),
    );
    assert!(matches!(robust_censored_comparison(&q), Err(Error::Unsupported(_))));
}

#[test]
fn censored_uniform_three_products_golden() {
    let q = query(
        &SparseChoiceModel::uniform(3).unwrap(),
        ObservationScheme::censored_comparison(3).unwrap(),
        Assortment::full(3),
        PriceVector::unit(3),
    );
    let b = robust_bruteforce(&q).unwrap().bound;
    assert!((b - 2.0 / 3.0).abs() < 1e-9, "{b}");
}

#[test]
fn sampled_dual_full_enumeration_and_nesting() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let model = random_model(5, 8, &mut rng);
    let q = query(
        &model,
        ObservationScheme::comparison(5).unwrap(),
        random_target(5, &mut rng),
        random_prices(5, &mut rng),
    );
    let b = robust_bruteforce(&q).unwrap().bound;
    let all = all_rank_lists(5).unwrap();
    let full = robust_sampled_columns(&q, &all).unwrap();
    assert!((full.bound - b).abs() < 1e-9);
    check_certificate(&q, &full);

    let mut prev = f64::INFINITY;
    for n_samples in [100, 1000, 10000] {
        let mut draw = ChaCha8Rng::seed_from_u64(41);
        match robust_sampled_dual(&q, n_samples, &UniformSampler { n: 5 }, &mut draw) {
            Ok(r) => {
                assert!(r.bound >= b - 1e-9 && r.bound <= prev + 1e-9);
                let cert = r.certificate.unwrap();
                assert!((cert.value() - r.bound).abs() < 1e-7);
                prev = r.bound;
            }
            Err(Error::Unbounded(_)) => assert!(prev.is_infinite()),
            Err(e) => panic!("{e}"),
        }
    }
    assert!((prev - b).abs() < 1e-6);
    let mut draw = ChaCha8Rng::seed_from_u64(1);
    assert!(matches!(
        robust_sampled_dual(&q, 0, &UniformSampler { n: 5 }, &mut draw),
        Err(Error::Unbounded(_))
    ));
}

#[test]
fn sampled_dual_from_the_truth_is_feasible() {
    let mnl = MnlModel::new(vec![1.0, 2.0, 0.5, 1.5]).unwrap();
    let model = mnl.to_rank_distribution().unwrap();
    let q = query(
        &model,
        ObservationScheme::top_set(4).unwrap(),
        Assortment::new([1, 3]),
        PriceVector::unit(4),
    );
    let mut draw = ChaCha8Rng::seed_from_u64(2);
    let r = robust_sampled_dual(&q, 5000, &mnl, &mut draw).unwrap();
    assert!(r.bound >= robust_bruteforce(&q).unwrap().bound - 1e-9);
    assert_eq!(r.status, RobustStatus::Restricted);
}

#[test]
fn self_consistency_with_target_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..5 {
        let model = random_model(5, 6, &mut rng);
        let target = random_target(5, &mut rng);
        let prices = random_prices(5, &mut rng);
        let mut list: Vec<Assortment> = (0..3).map(|_| random_target(5, &mut rng)).collect();
        list.push(target.clone());
        let scheme = ObservationScheme::transaction(5, list).unwrap();
        let q = query(&model, scheme, target.clone(), prices.clone());
        let want = model.revenue(&target, &prices).unwrap();
        for sense in [Sense::Min, Sense::Max] {
            let q = q.with_sense(sense);
            assert!((robust_bruteforce(&q).unwrap().bound - want).abs() < 1e-6);
            assert!((robust_cutting_plane(&q, 4).unwrap().bound - want).abs() < 1e-6);
        }
    }
}

fn counts_from(model: &SparseChoiceModel, list: &[Assortment], arrivals: u64) -> TransactionCounts {
    let counts = list
        .iter()
        .map(|a| {
            model
                .choice_probs(a)
                .unwrap()
                .iter()
                .map(|p| libm::round(p * arrivals as f64) as u64)
                .collect()
        })
        .collect();
    TransactionCounts::new(model.n(), list.to_vec(), counts).unwrap()
}

#[test]
fn interval_method() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let model = random_model(4, 5, &mut rng);
    let list: Vec<Assortment> = (0..4).map(|_| random_target(4, &mut rng)).collect();
    let target = Assortment::new([1, 2]);

    // Vacuous intervals.
    let counts = counts_from(&model, &list, 5);
    let opts = IntervalOptions { z: 1.0, min_count: 1000 };
    let r = robust_conversion_interval(&counts, &target, &opts).unwrap();
    assert!(r.bound.abs() < 1e-9);
    assert_eq!(r.method, Method::Interval);

    // Widening never raises the bound.
    let counts = counts_from(&model, &list, 2000);
    let zmin = find_min_feasible_z(&counts, MIN_COUNT, 1e-4).unwrap();
    let mut prev = f64::INFINITY;
    for k in 0..5 {
        let z = zmin + 1e-3 + k as f64 * 0.5;
        let r = robust_conversion_interval(&counts, &target, &IntervalOptions { z, min_count: MIN_COUNT }).unwrap();
        assert!(r.bound <= prev + 1e-9);
        prev = r.bound;
    }
    if zmin > 1e-3 {
        let below = IntervalOptions {
            z: zmin * 0.5,
            min_count: MIN_COUNT,
        };
        assert!(matches!(robust_conversion_interval(&counts, &target, &below), Err(Error::Infeasible(_))));
    }
}

#[test]
fn degenerate_intervals_match_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let model = random_model(4, 5, &mut rng);
    let list: Vec<Assortment> = (0..4).map(|_| random_target(4, &mut rng)).collect();
    let scheme = ObservationScheme::transaction(4, list).unwrap();
    let y = exact_marginals(&model, &scheme).unwrap();
    let iv: Vec<(f64, f64)> = y.values().iter().map(|&v| (v, v)).collect();
    let target = Assortment::new([1, 3]);
    let prices = PriceVector::unit(4);
    let eq = RobustQuery::min(y.clone(), target.clone(), prices.clone()).unwrap();
    let data = DataVector::with_intervals(scheme, y.values().to_vec(), iv).unwrap();
    let ivq = RobustQuery::new(data, target, prices, Sense::Min, ConstraintMode::Interval).unwrap();
    let a = robust_bruteforce(&eq).unwrap().bound;
    let b = robust_bruteforce(&ivq).unwrap().bound;
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn interval_mode_requires_intervals() {
    let scheme = ObservationScheme::comparison(3).unwrap();
    let y = exact_marginals(&SparseChoiceModel::uniform(3).unwrap(), &scheme).unwrap();
    let r = RobustQuery::new(y, Assortment::full(3), PriceVector::unit(3), Sense::Min, ConstraintMode::Interval);
    assert!(matches!(r, Err(Error::InvalidData(_))));
}

#[test]
fn result_serializes() {
    let q = query(
        &SparseChoiceModel::uniform(3).unwrap(),
        ObservationScheme::ranking(3).unwrap(),
        Assortment::new([1]),
        PriceVector::unit(3),
    );
    let r = robust_ranking_exact(&q).unwrap();
    let s = serde_json::to_string(&r).unwrap();
    let back: RobustResult = serde_json::from_str(&s).unwrap();
    assert_eq!(back.method, Method::Ranking);
    assert!((back.bound - r.bound).abs() < 1e-15);
}
