//! k-fold cross-validation of conversion-rate predictions on transaction
//! counts: the robust interval bound against a fitted MNL.

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use robustchoice_core::models::{fit_mnl, ChoiceProbabilities, TransactionCounts};
use robustchoice_core::robust::{find_min_feasible_z, robust_conversion_interval, IntervalOptions, MIN_COUNT};
use robustchoice_core::Error;

use crate::format::g12;
use crate::io::csv_table;

const Z_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZChoice {
    /// Use this z; fall back to the smallest feasible z when infeasible.
    Fixed(f64),
    /// Smallest feasible z on each training set.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub z: ZChoice,
    pub min_count: u64,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            z: ZChoice::Auto,
            min_count: MIN_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub fold: usize,
    /// Index of the assortment in the input.
    pub index: usize,
    pub assortment: String,
    pub z: f64,
    /// Observed conversion rate.
    pub y: f64,
    pub robust: f64,
    pub mnl: f64,
}

impl Prediction {
    pub fn robust_error(&self) -> f64 {
        (self.robust - self.y).abs() / self.y
    }

    pub fn mnl_error(&self) -> f64 {
        (self.mnl - self.y).abs() / self.y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub method: String,
    pub k: usize,
    pub folds: usize,
    pub predictions: usize,
    pub mean_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutput {
    pub predictions: Vec<Prediction>,
    pub summary: Vec<CvSummary>,
    pub warnings: Vec<String>,
}

impl CvOutput {
    pub fn summary_csv(&self) -> Result<String> {
        csv_table(
            &["method", "k", "folds", "predictions", "mean_rel_error"],
            self.summary.iter().map(|s| {
                vec![
                    s.method.clone(),
                    s.k.to_string(),
                    s.folds.to_string(),
                    s.predictions.to_string(),
                    g12(s.mean_rel_error),
                ]
            }),
        )
    }

    pub fn predictions_csv(&self) -> Result<String> {
        csv_table(
            &["fold", "index", "assortment", "z", "y", "robust", "mnl", "robust_error", "mnl_error"],
            self.predictions.iter().map(|p| {
                vec![
                    p.fold.to_string(),
                    p.index.to_string(),
                    p.assortment.clone(),
                    g12(p.z),
                    g12(p.y),
                    g12(p.robust),
                    g12(p.mnl),
                    g12(p.robust_error()),
                    g12(p.mnl_error()),
                ]
            }),
        )
    }

    pub fn mean_error(&self, method: &str) -> Option<f64> {
        self.summary.iter().find(|s| s.method == method).map(|s| s.mean_rel_error)
    }
}

/// Fold of every assortment: a seeded shuffle dealt round-robin.
pub fn assign_folds(len: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; len];
    for (pos, &m) in order.iter().enumerate() {
        fold[m] = pos % k;
    }
    fold
}

struct FoldResult {
    predictions: Vec<Prediction>,
    warnings: Vec<String>,
}

fn run_fold(counts: &TransactionCounts, fold_of: &[usize], f: usize, opts: &CvOptions) -> Result<FoldResult> {
    let train: Vec<usize> = (0..counts.len()).filter(|&m| fold_of[m] != f).collect();
    let test: Vec<usize> = (0..counts.len()).filter(|&m| fold_of[m] == f).collect();
    let mut warnings = Vec::new();
    let usable: Vec<usize> = test
        .iter()
        .copied()
        .filter(|&m| {
            let ok = counts.total(m) > 0 && counts.count(m, 0) < counts.total(m);
            if !ok {
                warnings.push(format!("fold {f}: assortment {m} has no purchases; skipped"));
            }
            ok
        })
        .collect();
    let training = counts.subset(&train);
    if usable.is_empty() || (0..training.len()).all(|m| training.total(m) == 0) {
        warnings.push(format!("fold {f}: no usable counts; skipped"));
        return Ok(FoldResult {
            predictions: Vec::new(),
            warnings,
        });
    }
    let z = match opts.z {
        ZChoice::Auto => find_min_feasible_z(&training, opts.min_count, Z_TOL)?,
        ZChoice::Fixed(z) => {
            let probe = IntervalOptions { z, min_count: opts.min_count };
            match robust_conversion_interval(&training, &counts.assortments[usable[0]], &probe) {
                Err(Error::Infeasible(_)) => {
                    let z_min = find_min_feasible_z(&training, opts.min_count, Z_TOL)?;
                    warnings.push(format!(
                        "fold {f}: z = {} is infeasible; using the smallest feasible z = {}",
                        g12(z),
                        g12(z_min)
                    ));
                    z_min
                }
                _ => z,
            }
        }
    };
    let iopts = IntervalOptions { z, min_count: opts.min_count };
    let mnl = fit_mnl(&training)?.model;
    let mut predictions = Vec::with_capacity(usable.len());
    for m in usable {
        let a = &counts.assortments[m];
        let y = 1.0 - counts.count(m, 0) as f64 / counts.total(m) as f64;
        let robust = robust_conversion_interval(&training, a, &iopts)?.bound;
        let p0 = mnl.choice_prob(0, a)?;
        predictions.push(Prediction {
            fold: f,
            index: m,
            assortment: a.to_string(),
            z,
            y,
            robust,
            mnl: 1.0 - p0,
        });
    }
    Ok(FoldResult { predictions, warnings })
}

/// Trains on `k - 1` folds and predicts the conversion rate of every
/// assortment in the held-out fold, for each fold in turn.
pub fn run_kfold_cv(counts: &TransactionCounts, opts: &CvOptions) -> Result<CvOutput> {
    if opts.k < 2 {
        bail!("k must be at least 2 (got {})", opts.k);
    }
    if opts.k > counts.len() {
        bail!("k = {} exceeds the number of assortments ({})", opts.k, counts.len());
    }
    let fold_of = assign_folds(counts.len(), opts.k, opts.seed);
    let folds = (0..opts.k)
        .into_par_iter()
        .map(|f| run_fold(counts, &fold_of, f, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut out = CvOutput {
        predictions: Vec::new(),
        summary: Vec::new(),
        warnings: Vec::new(),
    };
    let mut used = 0;
    for fold in folds {
        used += usize::from(!fold.predictions.is_empty());
        out.predictions.extend(fold.predictions);
        out.warnings.extend(fold.warnings);
    }
    out.predictions.sort_by_key(|p| p.index);
    let n = out.predictions.len();
    let mean = |e: &dyn Fn(&Prediction) -> f64| {
        if n == 0 {
            f64::NAN
        } else {
            out.predictions.iter().map(e).sum::<f64>() / n as f64
        }
    };
    let robust = mean(&Prediction::robust_error);
    let mnl = mean(&Prediction::mnl_error);
    for (method, err) in [("robust", robust), ("mnl", mnl)] {
        out.summary.push(CvSummary {
            method: method.into(),
            k: opts.k,
            folds: used,
            predictions: n,
            mean_rel_error: err,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_balanced_and_seeded() {
        let f = assign_folds(23, 5, 9);
        for k in 0..5 {
            let size = f.iter().filter(|&&x| x == k).count();
            assert!(size == 4 || size == 5);
        }
        assert_eq!(f, assign_folds(23, 5, 9));
        assert_ne!(f, assign_folds(23, 5, 10));
    }
}
