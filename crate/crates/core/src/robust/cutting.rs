use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::canonical::{decode_pairs, feasible_pieces, pair, push_order_rows, solve_final, FinalSolution, Map, Piece};
use super::{data_violation, DataRow, Method, RobustQuery, RobustResult, RobustStatus};
use crate::choice::{RankList, RowIndex, SchemeKind, Sense, SparseChoiceModel};
use crate::lp::{self, LpProblem, Relation};
use crate::{Error, Result};

pub const DEFAULT_MAX_ROUNDS: usize = 8;

const MAX_PIECES: usize = 4096;
const INT_TOL: f64 = 1e-6;
const MASS_TOL: f64 = 1e-9;
const VERIFY_TOL: f64 = 1e-6;
const MAX_PRICING_ROUNDS: usize = 200;

/// Lower bound (upper for a maximum) by successive refinement of outer
/// relaxations.
///
/// Rank lists are first split by the product `j` they pick from the target.
/// Each piece is relaxed to the tournament polytope (antisymmetry plus
/// transitivity on pair variables `x_ik`) with `x_ji = 1` for the other
/// members and exact linearizations of the scheme rows. Every round solves the
/// dual LP, maximizes `αᵀA(·)` over each piece and splits every piece whose
/// maximizer, or whose share of the primal solution, is fractional, fixing the
/// coordinate closest to 1/2 (lowest index on ties) to 0 and to 1.
///
/// After each round the integral maximizers seed a search, by column generation
/// over the optimal faces of the pieces, for a distribution on rank lists whose
/// dual constraints are tight and which reproduces the data. If one is found it
/// attains the round's bound, the result is `Exact` and the distribution is the
/// witness. Otherwise the best bound after `max_rounds` rounds (or once nothing
/// is left to split) is returned as `Relaxed`.
pub fn robust_cutting_plane(q: &RobustQuery, max_rounds: usize) -> Result<RobustResult> {
    q.check()?;
    if *q.scheme().kind() == SchemeKind::Ranking {
        return Err(Error::Unsupported("use the ranking method for ranking data".into()));
    }
    if max_rounds == 0 {
        return Err(Error::InvalidData("max_rounds must be at least 1".into()));
    }
    let n = q.n();
    let data_rows = q.data_rows();
    let mut pieces = feasible_pieces(q.target.members().iter().map(|&j| base_piece(q, j)).collect())?;
    let mut rounds = Vec::new();
    let mut log = Vec::new();
    let mut witness = None;
    let mut pool: Vec<RankList> = Vec::new();
    let (sol, pieces) = loop {
        let sol = solve_final(q, &data_rows, &pieces)?;
        rounds.push(sol.bound);
        let round = rounds.len();
        log.push(format!(
            "round {round}: {} pieces, bound {:.12}, {} simplex iterations",
            pieces.len(),
            sol.bound,
            sol.iterations
        ));
        let alpha = min_form(q, &sol.alpha);
        let maxima = pieces
            .iter()
            .map(|p| p.maximize(p.objective(&data_rows, &alpha)))
            .collect::<Result<Vec<_>>>()?;
        let nu = min_form_nu(q, sol.nu);
        pool.retain(|s| is_tight(q, &data_rows, &alpha, nu, s));
        for x in &maxima {
            if let Some(s) = decode_pairs(n, x, INT_TOL) {
                if !pool.contains(&s) && is_tight(q, &data_rows, &alpha, nu, &s) {
                    pool.push(s);
                }
            }
        }
        if let Some(w) = certify(q, &data_rows, &pieces, &alpha, &maxima, &sol, &mut pool)? {
            log.push(format!("certified by a distribution on {} rank lists", w.len()));
            witness = Some(w);
            break (sol, pieces);
        }
        if round == max_rounds {
            break (sol, pieces);
        }
        let (next, split) = refine(&pieces, &maxima, &sol)?;
        if split == 0 {
            log.push("no fractional piece left to split".into());
            break (sol, pieces);
        }
        if next.len() > MAX_PIECES {
            log.push(format!("stopping: {} pieces exceed the cap of {MAX_PIECES}", next.len()));
            break (sol, pieces);
        }
        pieces = next;
    };
    let best = match q.sense {
        Sense::Min => rounds.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Sense::Max => rounds.iter().copied().fold(f64::INFINITY, f64::min),
    };
    let status = if witness.is_some() {
        RobustStatus::Exact
    } else {
        RobustStatus::Relaxed
    };
    let mut res = RobustResult::new(best, Method::Cut, q.sense, status);
    res.certificate = Some(sol.certificate(&data_rows, &pieces));
    res.support = witness.as_ref().map(|w: &SparseChoiceModel| w.len());
    res.witness = witness;
    res.rounds = rounds;
    res.log = log;
    Ok(res)
}

/// Multipliers of the minimization form the dual LP is solved in.
fn min_form(q: &RobustQuery, alpha: &[f64]) -> Vec<f64> {
    match q.sense {
        Sense::Min => alpha.to_vec(),
        Sense::Max => alpha.iter().map(|a| -a).collect(),
    }
}

fn min_form_nu(q: &RobustQuery, nu: f64) -> f64 {
    match q.sense {
        Sense::Min => nu,
        Sense::Max => -nu,
    }
}

fn min_form_payoff(q: &RobustQuery, sigma: &RankList) -> f64 {
    match q.sense {
        Sense::Min => q.payoff(sigma),
        Sense::Max => -q.payoff(sigma),
    }
}

fn a_dot(q: &RobustQuery, data_rows: &[DataRow], weights: &[f64], sigma: &RankList) -> f64 {
    let scheme = q.scheme();
    let rows = scheme.rows();
    data_rows
        .iter()
        .zip(weights)
        .filter(|(r, _)| scheme.entry(sigma, rows[r.t]))
        .map(|(_, w)| *w)
        .sum()
}

fn is_tight(q: &RobustQuery, data_rows: &[DataRow], alpha: &[f64], nu: f64, sigma: &RankList) -> bool {
    (a_dot(q, data_rows, alpha, sigma) + nu - min_form_payoff(q, sigma)).abs() <= 1e-7
}

/// Looks for a distribution over rank lists that attain their dual
/// constraint, matching the data. Columns are priced over the optimal faces
/// of the pieces, so any distribution found attains the round's bound.
fn certify(
    q: &RobustQuery,
    data_rows: &[DataRow],
    pieces: &[Piece],
    alpha: &[f64],
    maxima: &[Vec<f64>],
    sol: &FinalSolution,
    pool: &mut Vec<RankList>,
) -> Result<Option<SparseChoiceModel>> {
    let n = q.n();
    let nu = min_form_nu(q, sol.nu);
    let faces: Vec<Piece> = pieces
        .iter()
        .zip(maxima)
        .map(|(p, x)| {
            let obj = p.objective(data_rows, alpha);
            let f: f64 = obj.iter().zip(x).map(|(c, v)| c * v).sum();
            let terms: Vec<(usize, f64)> = obj.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(v, c)| (v, *c)).collect();
            let mut face = p.clone();
            if !terms.is_empty() {
                face.push(terms, Relation::Ge, f - 1e-9 * (1.0 + f.abs()), "face");
            }
            face
        })
        .collect();
    for _ in 0..MAX_PRICING_ROUNDS {
        if pool.is_empty() {
            return Ok(None);
        }
        let (gap, lambda, duals) = mismatch(q, data_rows, pool)?;
        if gap <= 1e-10 {
            let weights: Vec<(RankList, f64)> = pool
                .iter()
                .zip(&lambda)
                .filter(|(_, l)| **l > 1e-12)
                .map(|(s, l)| (s.clone(), *l))
                .collect();
            let w = SparseChoiceModel::from_weights(weights)?;
            let revenue = w.revenue(&q.target, &q.prices)?;
            if data_violation(q, &w)? <= VERIFY_TOL && (revenue - sol.bound).abs() <= VERIFY_TOL {
                return Ok(Some(w));
            }
            return Ok(None);
        }
        let (pi, pi0) = duals;
        let mut added = 0;
        for face in &faces {
            let x = face.maximize(face.objective(data_rows, &pi))?;
            if let Some(s) = decode_pairs(n, &x, INT_TOL) {
                if a_dot(q, data_rows, &pi, &s) + pi0 > 1e-9
                    && !pool.contains(&s)
                    && is_tight(q, data_rows, alpha, nu, &s)
                {
                    pool.push(s);
                    added += 1;
                }
            }
        }
        if added == 0 {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Minimum total data violation over mixtures of `pool`, with the mixture
/// and the row duals.
fn mismatch(q: &RobustQuery, data_rows: &[DataRow], pool: &[RankList]) -> Result<(f64, Vec<f64>, (Vec<f64>, f64))> {
    let scheme = q.scheme();
    let rows = scheme.rows();
    let k = pool.len();
    let mut slack = Vec::new();
    for (i, r) in data_rows.iter().enumerate() {
        match r.rel {
            Relation::Eq => {
                slack.push((i, 1.0));
                slack.push((i, -1.0));
            }
            Relation::Ge => slack.push((i, 1.0)),
            Relation::Le => slack.push((i, -1.0)),
        }
    }
    let mut cost = vec![0.0; k];
    cost.extend(core::iter::repeat(1.0).take(slack.len()));
    let mut lp = LpProblem::minimize(cost);
    for (i, r) in data_rows.iter().enumerate() {
        let mut coeffs: Vec<f64> = pool
            .iter()
            .map(|s| if scheme.entry(s, rows[r.t]) { 1.0 } else { 0.0 })
            .collect();
        coeffs.extend(slack.iter().map(|&(row, c)| if row == i { c } else { 0.0 }));
        lp.add_row(coeffs, r.rel, r.rhs);
    }
    let mut norm = vec![1.0; k];
    norm.extend(core::iter::repeat(0.0).take(slack.len()));
    lp.add_row(norm, Relation::Eq, 1.0);
    let sol = lp::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Numerical("restricted mismatch LP failed".into()));
    }
    let m = data_rows.len();
    Ok((sol.objective, sol.x[..k].to_vec(), (sol.duals[..m].to_vec(), sol.duals[m])))
}

fn refine(pieces: &[Piece], maxima: &[Vec<f64>], sol: &FinalSolution) -> Result<(Vec<Piece>, usize)> {
    let mut next = Vec::with_capacity(pieces.len() * 2);
    let mut split = 0;
    for ((piece, xhat), (mu, point)) in pieces.iter().zip(maxima).zip(&sol.points) {
        let coord = most_fractional(xhat).or_else(|| {
            if *mu > MASS_TOL {
                let x: Vec<f64> = point.iter().map(|v| v / mu).collect();
                most_fractional(&x)
            } else {
                None
            }
        });
        match coord {
            Some(c) => {
                split += 1;
                for v in [0.0, 1.0] {
                    let child = piece.fixed(c, v);
                    if child.is_feasible()? {
                        next.push(child);
                    }
                }
            }
            None => next.push(piece.clone()),
        }
    }
    Ok((next, split))
}

/// Fractional coordinate closest to 1/2, lowest index on ties.
fn most_fractional(x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in x.iter().enumerate() {
        if (v - v.round()).abs() <= INT_TOL {
            continue;
        }
        let d = (v - 0.5).abs();
        if best.map_or(true, |(_, b)| d < b - 1e-12) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Relaxation of the rank lists that pick `j` from the target.
fn base_piece(q: &RobustQuery, j: usize) -> Piece {
    let n = q.n();
    let scheme = q.scheme();
    let mut n_vars = n * (n - 1);
    let mut and_rows: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut aux = |members: Vec<usize>, n_vars: &mut usize| {
        let v = *n_vars;
        *n_vars += 1;
        and_rows.push((v, members));
        Map::Var(v)
    };
    let mut map = Vec::with_capacity(scheme.m());
    for row in scheme.rows() {
        let m = match *row {
            RowIndex::Pref { i, j } => Map::Var(pair(n, i, j)),
            RowIndex::Top { i } => {
                let others = (0..n).filter(|&k| k != i).map(|k| pair(n, i, k)).collect();
                aux(others, &mut n_vars)
            }
            RowIndex::Censored { i, j: k } => {
                if i == 0 {
                    Map::Var(pair(n, 0, k))
                } else if k == 0 {
                    Map::Var(pair(n, i, 0))
                } else {
                    aux(vec![pair(n, i, k), pair(n, i, 0)], &mut n_vars)
                }
            }
            RowIndex::Sale { i, m } => {
                let others: Vec<usize> = scheme.assortments()[m]
                    .members()
                    .iter()
                    .filter(|&&k| k != i)
                    .map(|&k| pair(n, i, k))
                    .collect();
                match others.len() {
                    0 => Map::Const(1.0),
                    1 => Map::Var(others[0]),
                    _ => aux(others, &mut n_vars),
                }
            }
            RowIndex::Rank { .. } => unreachable!("ranking data is handled elsewhere"),
        };
        map.push(m);
    }
    let mut p = Piece::new(j, n_vars, map);
    push_order_rows(&mut p, n, q.target.members());
    for (z, members) in and_rows {
        for &x in &members {
            p.push(vec![(z, 1.0), (x, -1.0)], Relation::Le, 0.0, "and");
        }
        let mut terms = vec![(z, 1.0)];
        terms.extend(members.iter().map(|&x| (x, -1.0)));
        p.push(terms, Relation::Ge, 1.0 - members.len() as f64, "and");
    }
    p
}
