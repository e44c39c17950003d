use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::fit::sparsest_fit;
use crate::choice::{all_rank_lists, Assortment, DataVector, ObservationScheme, PriceVector, MAX_ENUMERATION_N};
use crate::robust::{robust_bruteforce, RobustQuery};
use crate::{Error, Result};

/// How the sparsest support was pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "support", rename_all = "snake_case")]
pub enum SparseSupport {
    /// The sparsest fit recovered a model of this support.
    Recovered(usize),
    /// The fit failed; for data drawn from a density on the data polytope the
    /// sparsest support is at least the rank `d` of the augmented `A` almost
    /// surely, and this is that `d`.
    RankBound(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Number of data rows.
    pub m: usize,
    /// Rank of `A` with a row of ones appended.
    pub rank: usize,
    /// Support of the minimizing basic solution.
    pub bfs_support: usize,
    pub sparse: SparseSupport,
    /// Minimum revenue found by the brute-force LP.
    pub bound: f64,
}

impl AuditReport {
    /// `‖λ_min‖₀ ≤ m + 1`.
    pub fn support_bound_ok(&self) -> bool {
        self.bfs_support <= self.m + 1
    }

    /// `0 ≤ ‖λ_min‖₀ − ‖λ_sparse‖₀ ≤ 1`, judged against the rank bound when the
    /// fit failed.
    pub fn gap_ok(&self) -> bool {
        let k = match self.sparse {
            SparseSupport::Recovered(k) | SparseSupport::RankBound(k) => k,
        };
        self.bfs_support >= k && self.bfs_support <= k + 1
    }
}

/// Support of the worst-case basic solution for `target` against the sparsest
/// support consistent with `y`. Needs `N ≤ 8`.
pub fn bfs_sparsity_audit(y: &DataVector, target: &Assortment, prices: &PriceVector) -> Result<AuditReport> {
    let q = RobustQuery::min(y.clone(), target.clone(), prices.clone())?;
    let res = robust_bruteforce(&q)?;
    let bfs_support = res.support.expect("brute force reports its support");
    let rank = augmented_rank(y.scheme())?;
    let fit = sparsest_fit(y)?;
    let sparse = match fit.model {
        Some(m) => SparseSupport::Recovered(m.len()),
        None => SparseSupport::RankBound(rank),
    };
    Ok(AuditReport {
        m: y.m(),
        rank,
        bfs_support,
        sparse,
        bound: res.bound,
    })
}

/// Rank of the `(m+1) × N!` matrix of all columns plus a row of ones.
pub fn augmented_rank(scheme: &ObservationScheme) -> Result<usize> {
    let n = scheme.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ENUMERATION_N,
        });
    }
    let mut rows: Vec<Vec<f64>> = (0..=scheme.m()).map(|_| Vec::new()).collect();
    for sigma in all_rank_lists(n)? {
        let col = scheme.a_column(&sigma)?;
        for (d, &bit) in col.iter().enumerate() {
            rows[d].push(bit as f64);
        }
        rows[scheme.m()].push(1.0);
    }
    Ok(rank(rows))
}

/// Gaussian elimination with partial pivoting.
fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[c] / pivot[c];
            if f != 0.0 {
                for (x, &v) in row.iter_mut().zip(&pivot).skip(c) {
                    *x -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}
