use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robustchoice_core::choice::{
    exact_marginals, Assortment, ObservationScheme, PriceVector, RankList, RowIndex, Sense, SparseChoiceModel,
};
use robustchoice_core::models::{ChoiceProbabilities, MnlModel};
use robustchoice_core::robust::{robust_bruteforce, RobustQuery};

fn rank_list(n: usize) -> impl Strategy<Value = RankList> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|o| RankList::from_order(&o).unwrap())
}

fn sparse_model(n: usize) -> impl Strategy<Value = SparseChoiceModel> {
    prop::collection::vec((rank_list(n), 0.01f64..1.0), 1..6)
        .prop_map(|w| SparseChoiceModel::from_weights(w).unwrap())
}

fn assortment(n: usize) -> impl Strategy<Value = Assortment> {
    prop::collection::vec(any::<bool>(), n - 1)
        .prop_map(|keep| Assortment::new((1..keep.len() + 1).filter(|&j| keep[j - 1])))
}

fn prices(n: usize) -> impl Strategy<Value = PriceVector> {
    prop::collection::vec(0.0f64..5.0, n - 1).prop_map(|p| PriceVector::from_products(&p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn comparison_columns_are_tournaments(sigma in rank_list(6)) {
        let scheme = ObservationScheme::comparison(6).unwrap();
        let col = scheme.a_column(&sigma).unwrap();
        let pref = |i: usize, j: usize| col[scheme.row_of(RowIndex::Pref { i, j }).unwrap()] == 1;
        for i in 0..6 {
            for j in (0..6).filter(|&j| j != i) {
                prop_assert!(pref(i, j) != pref(j, i));
                for k in (0..6).filter(|&k| k != i && k != j) {
                    prop_assert!(!(pref(i, j) && pref(j, k)) || pref(i, k));
                }
            }
        }
    }

    #[test]
    fn ranking_columns_are_permutation_matrices(sigma in rank_list(6)) {
        let scheme = ObservationScheme::ranking(6).unwrap();
        let col = scheme.a_column(&sigma).unwrap();
        for r in 1..=6 {
            let hits: u8 = (0..6).map(|i| col[scheme.row_of(RowIndex::Rank { r, i }).unwrap()]).sum();
            prop_assert_eq!(hits, 1);
        }
        for i in 0..6 {
            let hits: u8 = (1..=6).map(|r| col[scheme.row_of(RowIndex::Rank { r, i }).unwrap()]).sum();
            prop_assert_eq!(hits, 1);
        }
    }

    #[test]
    fn choice_probabilities_sum_to_one(model in sparse_model(5), a in assortment(5), u in prop::collection::vec(-2.0f64..2.0, 4)) {
        let total: f64 = model.choice_probs(&a).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let mnl = MnlModel::from_utilities(&u).unwrap();
        let total: f64 = ChoiceProbabilities::choice_probs(&mnl, &a).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginals_are_linear(a in sparse_model(4), b in sparse_model(4), w in 0.05f64..0.95) {
        let schemes = [
            ObservationScheme::comparison(4).unwrap(),
            ObservationScheme::ranking(4).unwrap(),
            ObservationScheme::top_set(4).unwrap(),
            ObservationScheme::censored_comparison(4).unwrap(),
        ];
        let mix = a.mixture(&b, w).unwrap();
        for s in &schemes {
            let ya = exact_marginals(&a, s).unwrap();
            let yb = exact_marginals(&b, s).unwrap();
            let ym = exact_marginals(&mix, s).unwrap();
            for t in 0..s.m() {
                let lin = w * ya.values()[t] + (1.0 - w) * yb.values()[t];
                prop_assert!((ym.values()[t] - lin).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn revenue_is_bounded_by_prices(model in sparse_model(5), a in assortment(5), p in prices(5)) {
        let r = model.revenue(&a, &p).unwrap();
        let top = a.members().iter().map(|&j| p.get(j)).fold(0.0, f64::max);
        prop_assert!(r >= -1e-12 && r <= top + 1e-12);
    }

    #[test]
    fn model_json_round_trip(model in sparse_model(5)) {
        let s = serde_json::to_string(&model).unwrap();
        let back: SparseChoiceModel = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, model);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn robust_bounds_sandwich_the_truth(model in sparse_model(4), a in assortment(4), p in prices(4), kind in 0usize..3) {
        let scheme = match kind {
            0 => ObservationScheme::comparison(4).unwrap(),
            1 => ObservationScheme::top_set(4).unwrap(),
            _ => ObservationScheme::censored_comparison(4).unwrap(),
        };
        let y = exact_marginals(&model, &scheme).unwrap();
        let truth = model.revenue(&a, &p).unwrap();
        let q = RobustQuery::min(y, a, p).unwrap();
        let lo = robust_bruteforce(&q).unwrap().bound;
        let hi = robust_bruteforce(&q.with_sense(Sense::Max)).unwrap().bound;
        prop_assert!(lo <= truth + 1e-9 && truth <= hi + 1e-9, "{} {} {}", lo, truth, hi);
    }
}

#[test]
fn sampled_rank_lists_are_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 2..9 {
        let sigma = RankList::random(n, &mut rng).unwrap();
        let mut order = sigma.order();
        order.sort_unstable();
        assert_eq!(order, (0..n).collect::<Vec<_>>());
    }
}
