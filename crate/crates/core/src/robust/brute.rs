use alloc::format;
use alloc::vec::Vec;

use super::{Certificate, Method, RobustQuery, RobustResult, RobustStatus};
use crate::choice::{all_rank_lists, RankList, Sense, SparseChoiceModel, MAX_ENUMERATION_N};
use crate::lp::{self, Direction, LpProblem, LpStatus, Relation};
use crate::{Error, Result};

const WITNESS_TOL: f64 = 1e-12;
const SUPPORT_TOL: f64 = 1e-9;

/// Exact optimum by an LP over all N! rank lists (`N ≤ 8`).
///
/// The witness is the optimal basic solution; `support` counts its entries
/// above 1e-9.
pub fn robust_bruteforce(q: &RobustQuery) -> Result<RobustResult> {
    q.check()?;
    let n = q.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ENUMERATION_N,
        });
    }
    let columns = all_rank_lists(n)?;
    let mut res = solve_columns(q, &columns, Method::Brute)?.ok_or_else(|| {
        Error::Infeasible("no distribution over rank lists reproduces the data".into())
    })?;
    res.status = RobustStatus::Exact;
    Ok(res)
}

/// Solves the primal restricted to `columns` (assumed distinct). `None` when
/// that restriction is infeasible.
pub(crate) fn solve_columns(q: &RobustQuery, columns: &[RankList], method: Method) -> Result<Option<RobustResult>> {
    if columns.is_empty() {
        return Ok(None);
    }
    let scheme = q.scheme();
    let rows = scheme.rows();
    let data_rows = q.data_rows();
    let cost: Vec<f64> = columns.iter().map(|s| q.payoff(s)).collect();
    let direction = match q.sense {
        Sense::Min => Direction::Minimize,
        Sense::Max => Direction::Maximize,
    };
    let mut lp = LpProblem::new(direction, cost);
    for r in &data_rows {
        let row = rows[r.t];
        let coeffs = columns
            .iter()
            .map(|s| if scheme.entry(s, row) { 1.0 } else { 0.0 })
            .collect();
        lp.add_row(coeffs, r.rel, r.rhs);
    }
    lp.add_row(alloc::vec![1.0; columns.len()], Relation::Eq, 1.0);
    let sol = lp::solve(&lp)?;
    match sol.status {
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => return Err(Error::Numerical("bounded column LP reported unbounded".into())),
        LpStatus::Optimal => {}
    }
    let support = sol.x.iter().filter(|&&v| v > SUPPORT_TOL).count();
    let weights: Vec<(RankList, f64)> = columns
        .iter()
        .zip(&sol.x)
        .filter(|(_, &v)| v > WITNESS_TOL)
        .map(|(s, &v)| (s.clone(), v))
        .collect();
    let witness = SparseChoiceModel::from_weights(weights)?;
    let m = data_rows.len();
    let certificate = Certificate {
        rows: data_rows.iter().map(|r| r.t).collect(),
        rhs: data_rows.iter().map(|r| r.rhs).collect(),
        alpha: sol.duals[..m].to_vec(),
        nu: sol.duals[m],
        groups: Vec::new(),
    };
    let mut res = RobustResult::new(sol.objective, method, q.sense, RobustStatus::Exact);
    res.witness = Some(witness);
    res.support = Some(support);
    res.certificate = Some(certificate);
    res.log.push(format!(
        "{} columns, {} data rows, {} simplex iterations, residual {:.3e}",
        columns.len(),
        m,
        sol.iterations,
        sol.primal_residual
    ));
    Ok(Some(res))
}
