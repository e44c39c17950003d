use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robustchoice::crossval::{run_kfold_cv, CvOptions, ZChoice};
use robustchoice::study::{run_simulation_study, ExperimentSpec, Source};
use robustchoice_core::choice::{Assortment, RankList, SparseChoiceModel};
use robustchoice_core::models::presets::{mnl_rand, Family};
use robustchoice_core::models::{simulate_transactions, GroundTruth};
use robustchoice_core::robust::Method;

fn all_nonempty(n: usize) -> Vec<Assortment> {
    (1u32..(1 << (n - 1)))
        .map(|mask| Assortment::new((1..n).filter(|&j| mask & (1 << (j - 1)) != 0)))
        .collect()
}

#[test]
fn mnl_rand_bounds_never_exceed_truth() {
    let mut spec = ExperimentSpec::new(Source::Family(Family::MnlRand), 6, 21);
    spec.method = Method::Brute;
    let out = run_simulation_study(&spec).unwrap();
    assert_eq!(out.records.len() + out.excluded.len(), 100);
    assert!(out.records.iter().all(|r| r.rel_error >= -1e-6));
    assert_eq!(out.histogram.iter().sum::<usize>(), out.records.len());
}

#[test]
fn deterministic_truth_has_zero_error() {
    let sigma = RankList::from_order(&[3, 1, 4, 2, 5, 0]).unwrap();
    let truth = GroundTruth::Sparse {
        model: SparseChoiceModel::deterministic(sigma),
    };
    let mut spec = ExperimentSpec::new(Source::Model(truth), 6, 2);
    spec.instances = 3;
    let out = run_simulation_study(&spec).unwrap();
    assert!(!out.records.is_empty());
    assert!(out.excluded.is_empty());
    for r in &out.records {
        assert!(r.rel_error.abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn censored_relaxation_is_a_lower_bound() {
    let mut spec = ExperimentSpec::new(Source::Family(Family::CnlRand), 5, 4);
    spec.method = Method::Censored;
    spec.instances = 4;
    spec.with_max = true;
    let out = run_simulation_study(&spec).unwrap();
    for r in &out.records {
        assert!(r.rel_error >= -1e-6);
        assert!(r.r_true <= r.r_max.unwrap() + 1e-6);
    }
}

#[test]
fn leave_one_out_with_duplicates_tracks_sampling_noise() {
    let n = 5;
    let truth = mnl_rand(n, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
    let base = all_nonempty(n);
    let list: Vec<Assortment> = base.iter().chain(base.iter()).cloned().collect();
    let counts = simulate_transactions(&truth, &list, 100_000, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let opts = CvOptions {
        k: list.len(),
        z: ZChoice::Auto,
        ..CvOptions::default()
    };
    let out = run_kfold_cv(&counts, &opts).unwrap();
    assert_eq!(out.predictions.len(), list.len());
    let robust = out.mean_error("robust").unwrap();
    assert!(robust < 0.02, "robust LOO error {robust}");
}

#[test]
fn robust_is_close_to_mnl_in_an_mnl_world() {
    let n = 6;
    let truth = mnl_rand(n, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
    let list = all_nonempty(n);
    let counts = simulate_transactions(&truth, &list, 100_000, &mut ChaCha8Rng::seed_from_u64(13)).unwrap();
    let opts = CvOptions {
        k: 5,
        seed: 1,
        z: ZChoice::Auto,
        ..CvOptions::default()
    };
    let out = run_kfold_cv(&counts, &opts).unwrap();
    let robust = out.mean_error("robust").unwrap();
    let mnl = out.mean_error("mnl").unwrap();
    eprintln!("robust {robust}, mnl {mnl}");
    assert!(robust <= mnl + 0.05, "robust {robust}, mnl {mnl}");
}

#[test]
fn test_folds_never_reach_training() {
    let n = 4;
    let truth = mnl_rand(n, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let list = all_nonempty(n);
    let counts = simulate_transactions(&truth, &list, 10_000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let a = run_kfold_cv(&counts, &CvOptions { k: 7, ..CvOptions::default() }).unwrap();
    // Changing the counts of a held-out assortment changes only its own
    // prediction target, never the predictions of its fold.
    let mut altered = counts.clone();
    let held = a.predictions[0].index;
    altered.counts[held].iter_mut().for_each(|c| *c *= 3);
    let b = run_kfold_cv(&altered, &CvOptions { k: 7, ..CvOptions::default() }).unwrap();
    let fold = a.predictions[0].fold;
    for (x, y) in a.predictions.iter().zip(&b.predictions) {
        if x.fold == fold {
            assert_eq!(x.robust, y.robust);
            assert_eq!(x.mnl, y.mnl);
        }
    }
}
