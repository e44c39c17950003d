use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::canonical::{feasible_pieces, solve_final, Map, Piece};
use super::{Method, RobustQuery, RobustResult, RobustStatus};
use crate::choice::{RowIndex, SchemeKind};
use crate::lp::Relation;
use crate::{Error, Result};

/// Exact optimum for ranking data.
///
/// Rank lists are split by the pair `(j, d)`: `j` is picked from the target and
/// sits at position `d`. Inside a piece the remaining positions and products
/// form a bipartite matching polytope with some cells removed (members of the
/// target other than `j` cannot sit above `d`), which is integral, so the dual
/// LP is exact.
pub fn robust_ranking_exact(q: &RobustQuery) -> Result<RobustResult> {
    q.check()?;
    if *q.scheme().kind() != SchemeKind::Ranking {
        return Err(Error::Unsupported(format!(
            "ranking method needs ranking data, got {}",
            q.scheme().kind().name()
        )));
    }
    let n = q.n();
    let target = q.target.members();
    let mut pieces = Vec::new();
    for &j in target {
        for d in 1..=n {
            pieces.push(piece(q, j, d));
        }
    }
    let pieces = feasible_pieces(pieces)?;
    let data_rows = q.data_rows();
    let sol = solve_final(q, &data_rows, &pieces)?;
    let mut res = RobustResult::new(sol.bound, Method::Ranking, q.sense, RobustStatus::Exact);
    res.certificate = Some(sol.certificate(&data_rows, &pieces));
    res.log.push(format!(
        "{} pieces, {} simplex iterations",
        pieces.len(),
        sol.iterations
    ));
    Ok(res)
}

fn piece(q: &RobustQuery, j: usize, d: usize) -> Piece {
    let n = q.n();
    let forbidden = |r: usize, i: usize| r < d && i != j && q.target.contains(i);
    let mut index = vec![None; n * n];
    let mut n_vars = 0;
    for r in 1..=n {
        for i in 0..n {
            if r != d && i != j && !forbidden(r, i) {
                index[(r - 1) * n + i] = Some(n_vars);
                n_vars += 1;
            }
        }
    }
    let map = q
        .scheme()
        .rows()
        .iter()
        .map(|row| match *row {
            RowIndex::Rank { r, i } => match index[(r - 1) * n + i] {
                Some(v) => Map::Var(v),
                None if r == d && i == j => Map::Const(1.0),
                None => Map::Const(0.0),
            },
            _ => unreachable!("ranking scheme has only rank rows"),
        })
        .collect();
    let mut p = Piece::new(j, n_vars, map);
    for r in (1..=n).filter(|&r| r != d) {
        let terms = (0..n).filter_map(|i| index[(r - 1) * n + i]).map(|v| (v, 1.0)).collect();
        p.push(terms, Relation::Eq, 1.0, "position");
    }
    for i in (0..n).filter(|&i| i != j) {
        let terms = (1..=n).filter_map(|r| index[(r - 1) * n + i]).map(|v| (v, 1.0)).collect();
        p.push(terms, Relation::Eq, 1.0, "product");
    }
    p
}
