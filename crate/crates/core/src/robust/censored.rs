use alloc::format;
use alloc::vec;

use super::canonical::{feasible_pieces, pair, push_order_rows, solve_final, Map, Piece};
use super::{ConstraintMode, Method, RobustQuery, RobustResult, RobustStatus};
use crate::choice::{RowIndex, SchemeKind, Sense};
use crate::lp::Relation;
use crate::{Error, Result};

/// Lower bound on the minimum revenue from censored comparison data.
///
/// Requires `ConstraintMode::AtLeast` (so `α ≥ 0`) and a minimum. One piece per
/// member `j` of the target: pair variables `x_ik` under antisymmetry
/// (`delta`), transitivity (`gamma`) and `x_ji = 1` (`theta`), and purchase
/// variables `z_ik` bounded above by `x_ik` (`omega1`) and, for `i, k ≠ 0`, by
/// `x_i0` (`omega2`). Since the data rows only push `z` up, dropping the lower
/// linking rows is harmless once `Aλ ≥ y`, and the value never exceeds the
/// equality-constrained optimum.
pub fn robust_censored_comparison(q: &RobustQuery) -> Result<RobustResult> {
    q.check()?;
    if *q.scheme().kind() != SchemeKind::CensoredComparison {
        return Err(Error::Unsupported(format!(
            "censored method needs censored-comparison data, got {}",
            q.scheme().kind().name()
        )));
    }
    if q.sense != Sense::Min {
        return Err(Error::Unsupported("censored method only bounds the minimum".into()));
    }
    if q.mode != ConstraintMode::AtLeast {
        return Err(Error::Unsupported("censored method needs at-least data constraints".into()));
    }
    let pieces = feasible_pieces(q.target.members().iter().map(|&j| piece(q, j)).collect())?;
    let data_rows = q.data_rows();
    let sol = solve_final(q, &data_rows, &pieces)?;
    let mut res = RobustResult::new(sol.bound, Method::Censored, q.sense, RobustStatus::Relaxed);
    res.certificate = Some(sol.certificate(&data_rows, &pieces));
    res.log.push(format!(
        "{} pieces, {} simplex iterations",
        pieces.len(),
        sol.iterations
    ));
    Ok(res)
}

fn piece(q: &RobustQuery, j: usize) -> Piece {
    let n = q.n();
    let pairs = n * (n - 1);
    let z = |i, k| pairs + pair(n, i, k);
    let map = q
        .scheme()
        .rows()
        .iter()
        .map(|row| match *row {
            RowIndex::Censored { i, j: k } => Map::Var(z(i, k)),
            _ => unreachable!("censored scheme has only censored rows"),
        })
        .collect();
    let mut p = Piece::new(j, 2 * pairs, map);
    for i in 0..n {
        for k in (0..n).filter(|&k| k != i) {
            p.push(vec![(z(i, k), 1.0), (pair(n, i, k), -1.0)], Relation::Le, 0.0, "omega1");
        }
    }
    for i in 1..n {
        for k in (1..n).filter(|&k| k != i) {
            p.push(vec![(z(i, k), 1.0), (pair(n, i, 0), -1.0)], Relation::Le, 0.0, "omega2");
        }
    }
    push_order_rows(&mut p, n, q.target.members());
    p
}
