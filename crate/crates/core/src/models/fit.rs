use alloc::vec::Vec;

use super::{MnlModel, TransactionCounts};
use crate::lp::lu::Lu;
use crate::{Error, Result};

/// Bound on fitted mean utilities; products whose likelihood keeps
/// improving towards ±∞ end up here and are flagged.
pub const FIT_CLAMP: f64 = 25.0;

const GRAD_TOL: f64 = 1e-6;
const MAX_ITER: usize = 500;

/// A maximum-likelihood MNL fit.
#[derive(Debug, Clone, PartialEq)]
pub struct MnlFit {
    pub model: MnlModel,
    /// Products never purchased (or never offered): utility pinned at
    /// `-FIT_CLAMP`.
    pub pinned_low: Vec<usize>,
    /// Products whose utility ran into `+FIT_CLAMP`.
    pub pinned_high: Vec<usize>,
    pub iterations: usize,
    /// ∞-norm of the projected gradient of the average log-likelihood.
    pub gradient_norm: f64,
    pub converged: bool,
}

struct Objective<'a> {
    data: &'a TransactionCounts,
    total: f64,
}

impl Objective<'_> {
    /// Average log-likelihood, gradient and Hessian at utilities `v`.
    fn eval(&self, v: &[f64], want_hessian: bool) -> (f64, Vec<f64>, Vec<f64>) {
        let n = v.len();
        let mut ll = 0.0;
        let mut g = alloc::vec![0.0; n];
        let mut h = if want_hessian { alloc::vec![0.0; n * n] } else { Vec::new() };
        for (a, counts) in self.data.assortments.iter().zip(&self.data.counts) {
            let t: u64 = counts.iter().sum();
            if t == 0 {
                continue;
            }
            let t = t as f64;
            let members = a.members();
            let top = members.iter().map(|&i| v[i]).fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = members.iter().map(|&i| libm::exp(v[i] - top)).sum();
            let lse = top + libm::log(z);
            let p: Vec<f64> = members.iter().map(|&i| libm::exp(v[i] - lse)).collect();
            for (k, &i) in members.iter().enumerate() {
                let c = counts[k] as f64;
                ll += c * (v[i] - lse);
                g[i] += c - t * p[k];
                if want_hessian {
                    for (l, &j) in members.iter().enumerate() {
                        let d = if k == l { p[k] } else { 0.0 };
                        h[i * n + j] -= t * (d - p[k] * p[l]);
                    }
                }
            }
        }
        let s = 1.0 / self.total;
        (
            ll * s,
            g.into_iter().map(|x| x * s).collect(),
            h.into_iter().map(|x| x * s).collect(),
        )
    }
}

/// Fits MNL utilities `V_1..V_{n-1}` (`V_0 = 0`) by projected Newton ascent
/// on the average multinomial log-likelihood, stopping when the projected
/// gradient's ∞-norm is at most 1e-6.
pub fn fit_mnl(data: &TransactionCounts) -> Result<MnlFit> {
    let n = data.n;
    let total: u64 = (0..data.len()).map(|m| data.total(m)).sum();
    if total == 0 {
        return Err(Error::InvalidData("no transactions to fit".into()));
    }
    let mut bought = alloc::vec![0u64; n];
    for (a, counts) in data.assortments.iter().zip(&data.counts) {
        for (k, &i) in a.members().iter().enumerate() {
            bought[i] += counts[k];
        }
    }
    let pinned_low: Vec<usize> = (1..n).filter(|&i| bought[i] == 0).collect();
    // A product that takes every sale wherever it is offered has no finite
    // maximizer.
    let dominant: Vec<usize> = (1..n)
        .filter(|&i| {
            bought[i] > 0
                && data
                    .assortments
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.contains(i))
                    .all(|(m, _)| data.count(m, i) == data.total(m))
        })
        .collect();
    let free: Vec<bool> = (0..n)
        .map(|i| i > 0 && bought[i] > 0 && !dominant.contains(&i))
        .collect();
    let mut v = alloc::vec![0.0; n];
    for &i in &pinned_low {
        v[i] = -FIT_CLAMP;
    }
    for &i in &dominant {
        v[i] = FIT_CLAMP;
    }
    let obj = Objective {
        data,
        total: total as f64,
    };

    let mut iterations = 0;
    let mut gradient_norm = f64::INFINITY;
    let mut converged = false;
    while iterations < MAX_ITER {
        let (ll, g, h) = obj.eval(&v, true);
        // Coordinates at a bound with an outward gradient stay fixed.
        let active: Vec<usize> = (0..n)
            .filter(|&i| free[i] && !(v[i] >= FIT_CLAMP && g[i] > 0.0) && !(v[i] <= -FIT_CLAMP && g[i] < 0.0))
            .collect();
        gradient_norm = active.iter().map(|&i| g[i].abs()).fold(0.0, f64::max);
        if gradient_norm <= GRAD_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let k = active.len();
        let mut neg_h = alloc::vec![0.0; k * k];
        for (r, &i) in active.iter().enumerate() {
            for (c, &j) in active.iter().enumerate() {
                neg_h[r * k + c] = -h[i * n + j];
            }
            neg_h[r * k + r] += 1e-10;
        }
        let ga: Vec<f64> = active.iter().map(|&i| g[i]).collect();
        let dir = Lu::factor(k, neg_h).map_or_else(|| ga.clone(), |lu| lu.solve(&ga));
        let slope: f64 = dir.iter().zip(&ga).map(|(d, g)| d * g).sum();
        let dir = if slope > 0.0 { dir } else { ga.clone() };
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let mut trial = v.clone();
            for (r, &i) in active.iter().enumerate() {
                trial[i] = (v[i] + step * dir[r]).clamp(-FIT_CLAMP, FIT_CLAMP);
            }
            let (lt, _, _) = obj.eval(&trial, false);
            if lt >= ll {
                moved = trial != v;
                v = trial;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if !converged {
        let (_, g, _) = obj.eval(&v, false);
        gradient_norm = (0..n)
            .filter(|&i| free[i] && !(v[i] >= FIT_CLAMP && g[i] > 0.0))
            .map(|i| g[i].abs())
            .fold(0.0, f64::max);
        converged = gradient_norm <= GRAD_TOL;
    }
    let pinned_high: Vec<usize> = (1..n).filter(|&i| v[i] >= FIT_CLAMP).collect();
    Ok(MnlFit {
        model: MnlModel::from_utilities(&v[1..])?,
        pinned_low,
        pinned_high,
        iterations,
        gradient_norm,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::Assortment;
    use crate::models::{simulate_transactions, ChoiceProbabilities};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_generating_mnl() {
        let truth = MnlModel::new(vec![1.0, 0.6, 1.8, 0.3]).unwrap();
        let assortments = vec![
            Assortment::new([1, 2]),
            Assortment::new([2, 3]),
            Assortment::new([1, 3]),
            Assortment::full(4),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = simulate_transactions(&truth, &assortments, 1_000_000, &mut rng).unwrap();
        let fit = fit_mnl(&data).unwrap();
        assert!(fit.converged && fit.gradient_norm <= 1e-6);
        for a in &assortments {
            let p = fit.model.choice_probs(a).unwrap();
            let q = truth.choice_probs(a).unwrap();
            for (x, y) in p.iter().zip(&q) {
                assert!((x - y).abs() / y < 0.02);
            }
        }
    }

    #[test]
    fn symmetric_data_symmetric_weights() {
        let a = vec![Assortment::new([1, 2])];
        let data = TransactionCounts::new(3, a, vec![vec![500, 250, 250]]).unwrap();
        let fit = fit_mnl(&data).unwrap();
        let w = fit.model.weights();
        assert!((w[1] - w[2]).abs() < 1e-6);
        assert!((w[1] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn separation_is_clamped_and_flagged() {
        let a = vec![Assortment::new([1, 2])];
        let data = TransactionCounts::new(4, a, vec![vec![0, 40, 0]]).unwrap();
        let fit = fit_mnl(&data).unwrap();
        assert_eq!(fit.pinned_high, vec![1]);
        assert_eq!(fit.pinned_low, vec![2, 3]);
        assert!(fit.model.utilities()[1] >= FIT_CLAMP - 1e-9);
    }
}
