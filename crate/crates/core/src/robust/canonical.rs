//! The dual LP over a partition of rank lists into pieces.
//!
//! Each piece is described by a polytope `{x ≥ 0 : C x (rel) d}` whose points
//! encode `A(σ)` for the rank lists of the piece through a linear map `E`
//! (plus constants), and by the product `j` every rank list of the piece picks
//! from the target. For a minimum, the dual constraint of the piece
//! `max_x αᵀ(E x + e) + ν ≤ p_j` is replaced by its LP dual, which gives one
//! LP over `(α, ν, γ_1, …, γ_P)`. When every polytope is the convex hull of its
//! rank lists the LP value is the exact optimum; otherwise it is a lower bound.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Certificate, DataRow, RobustQuery};
use crate::choice::{ProductId, RankList, Sense};
use crate::lp::{self, Direction, LpProblem, LpStatus, Relation};
use crate::{Error, Result};

/// How a scheme row reads off a piece's variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Map {
    Var(usize),
    Const(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct InnerRow {
    pub terms: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
    pub group: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Piece {
    pub j: ProductId,
    pub n_vars: usize,
    pub rows: Vec<InnerRow>,
    /// One entry per scheme row.
    pub map: Vec<Map>,
}

impl Piece {
    pub fn new(j: ProductId, n_vars: usize, map: Vec<Map>) -> Self {
        Self {
            j,
            n_vars,
            rows: Vec::new(),
            map,
        }
    }

    pub fn push(&mut self, terms: Vec<(usize, f64)>, rel: Relation, rhs: f64, group: &'static str) {
        self.rows.push(InnerRow { terms, rel, rhs, group });
    }

    fn lp(&self, direction: Direction, cost: Vec<f64>) -> LpProblem {
        let mut lp = LpProblem::new(direction, cost);
        for r in &self.rows {
            lp.add_sparse_row(&r.terms, r.rel, r.rhs);
        }
        lp
    }

    pub fn is_feasible(&self) -> Result<bool> {
        let sol = lp::solve(&self.lp(Direction::Minimize, vec![0.0; self.n_vars]))?;
        Ok(sol.status == LpStatus::Optimal)
    }

    /// A maximizing vertex of `objᵀx` over the polytope.
    pub fn maximize(&self, obj: Vec<f64>) -> Result<Vec<f64>> {
        let sol = lp::solve(&self.lp(Direction::Maximize, obj))?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.x),
            LpStatus::Infeasible => Err(Error::Numerical("empty piece reached separation".into())),
            LpStatus::Unbounded => Err(Error::Numerical("piece polytope is unbounded".into())),
        }
    }

    /// The sub-piece with `x[var] = value`.
    pub fn fixed(&self, var: usize, value: f64) -> Self {
        let mut p = self.clone();
        p.push(vec![(var, 1.0)], Relation::Eq, value, "split");
        p
    }

    /// Inner objective `Eᵀα` for the given data rows and multipliers.
    pub fn objective(&self, data_rows: &[DataRow], alpha: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.n_vars];
        for (r, a) in data_rows.iter().zip(alpha) {
            if let Map::Var(v) = self.map[r.t] {
                c[v] += a;
            }
        }
        c
    }
}

/// Solution of the dual LP, expressed for the query's sense.
#[derive(Debug, Clone)]
pub(crate) struct FinalSolution {
    pub bound: f64,
    pub alpha: Vec<f64>,
    pub nu: f64,
    pub gammas: Vec<Vec<f64>>,
    /// Per piece: primal mass and the (unscaled) primal point `μ·x`.
    pub points: Vec<(f64, Vec<f64>)>,
    pub iterations: usize,
}

impl FinalSolution {
    pub fn certificate(&self, data_rows: &[DataRow], pieces: &[Piece]) -> Certificate {
        let mut groups = Vec::new();
        for (p, (piece, gamma)) in pieces.iter().zip(&self.gammas).enumerate() {
            let mut names: Vec<&'static str> = Vec::new();
            for r in &piece.rows {
                if !names.contains(&r.group) {
                    names.push(r.group);
                }
            }
            for name in names {
                let vals: Vec<f64> = piece
                    .rows
                    .iter()
                    .zip(gamma)
                    .filter(|(r, _)| r.group == name)
                    .map(|(_, g)| *g)
                    .collect();
                groups.push((format!("{name}[piece {p}, j={}]", piece.j), vals));
            }
        }
        Certificate {
            rows: data_rows.iter().map(|r| r.t).collect(),
            rhs: data_rows.iter().map(|r| r.rhs).collect(),
            alpha: self.alpha.clone(),
            nu: self.nu,
            groups,
        }
    }
}

fn relation_bounds(rel: Relation) -> (f64, f64) {
    match rel {
        Relation::Eq => (f64::NEG_INFINITY, f64::INFINITY),
        Relation::Ge => (0.0, f64::INFINITY),
        Relation::Le => (f64::NEG_INFINITY, 0.0),
    }
}

/// Builds and solves the dual LP over `pieces` (all assumed nonempty).
pub(crate) fn solve_final(q: &RobustQuery, data_rows: &[DataRow], pieces: &[Piece]) -> Result<FinalSolution> {
    if pieces.is_empty() {
        return Err(Error::Infeasible("no rank list is compatible with the target".into()));
    }
    let flip = match q.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let k = data_rows.len();
    let nu = k;
    let mut offsets = Vec::with_capacity(pieces.len());
    let mut total = k + 1;
    for p in pieces {
        offsets.push(total);
        total += p.rows.len();
    }
    let mut cost = vec![0.0; total];
    for (i, r) in data_rows.iter().enumerate() {
        cost[i] = r.rhs;
    }
    cost[nu] = 1.0;
    let mut lp = LpProblem::maximize(cost);
    for (i, r) in data_rows.iter().enumerate() {
        let (lo, hi) = relation_bounds(r.rel);
        lp.set_bounds(i, lo, hi);
    }
    lp.set_free(nu);
    let mut payoff_rows = Vec::with_capacity(pieces.len());
    let mut var_rows = Vec::with_capacity(pieces.len());
    for (p, piece) in pieces.iter().enumerate() {
        let off = offsets[p];
        for (r, row) in piece.rows.iter().enumerate() {
            // Inner ≤ rows carry γ ≥ 0, ≥ rows γ ≤ 0.
            let (lo, hi) = match row.rel {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (f64::NEG_INFINITY, f64::INFINITY),
            };
            lp.set_bounds(off + r, lo, hi);
        }
        let mut terms: Vec<(usize, f64)> = piece
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.rhs != 0.0)
            .map(|(r, row)| (off + r, row.rhs))
            .collect();
        terms.push((nu, 1.0));
        for (i, r) in data_rows.iter().enumerate() {
            if let Map::Const(c) = piece.map[r.t] {
                if c != 0.0 {
                    terms.push((i, c));
                }
            }
        }
        payoff_rows.push(lp.add_sparse_row(&terms, Relation::Le, flip * q.prices.get(piece.j)));

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); piece.n_vars];
        for (r, row) in piece.rows.iter().enumerate() {
            for &(v, c) in &row.terms {
                cols[v].push((off + r, c));
            }
        }
        for (i, r) in data_rows.iter().enumerate() {
            if let Map::Var(v) = piece.map[r.t] {
                cols[v].push((i, -1.0));
            }
        }
        let first = lp.num_rows();
        for col in &cols {
            lp.add_sparse_row(col, Relation::Ge, 0.0);
        }
        var_rows.push(first);
    }
    let sol = lp::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => {
            return Err(Error::Infeasible(
                "the dual LP is unbounded: no distribution over rank lists reproduces the data".into(),
            ))
        }
        LpStatus::Infeasible => return Err(Error::Numerical("dual LP reported infeasible".into())),
    }
    let gammas = pieces
        .iter()
        .zip(&offsets)
        .map(|(p, &off)| sol.x[off..off + p.rows.len()].iter().map(|g| flip * g).collect())
        .collect();
    let points = pieces
        .iter()
        .enumerate()
        .map(|(p, piece)| {
            let mu = sol.duals[payoff_rows[p]];
            let x = (0..piece.n_vars).map(|v| -sol.duals[var_rows[p] + v]).collect();
            (mu, x)
        })
        .collect();
    Ok(FinalSolution {
        bound: flip * sol.objective,
        alpha: sol.x[..k].iter().map(|a| flip * a).collect(),
        nu: flip * sol.x[nu],
        gammas,
        points,
        iterations: sol.iterations,
    })
}

/// Drops pieces whose polytope is empty.
pub(crate) fn feasible_pieces(pieces: Vec<Piece>) -> Result<Vec<Piece>> {
    let mut out = Vec::with_capacity(pieces.len());
    for p in pieces {
        if p.is_feasible()? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Index of the variable `x_ik` ("i preferred to k") among the `n(n-1)`
/// ordered pairs.
#[inline]
pub(crate) fn pair(n: usize, i: usize, k: usize) -> usize {
    debug_assert!(i != k);
    i * (n - 1) + if k < i { k } else { k - 1 }
}

/// Tournament rows for a piece where `j` is chosen from `target`:
/// antisymmetry, transitivity, and `x_ji = 1` for the other members.
pub(crate) fn push_order_rows(piece: &mut Piece, n: usize, target: &[ProductId]) {
    for i in 0..n {
        for k in i + 1..n {
            piece.push(vec![(pair(n, i, k), 1.0), (pair(n, k, i), 1.0)], Relation::Eq, 1.0, "delta");
        }
    }
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                if i != k && k != l && i != l {
                    piece.push(
                        vec![(pair(n, i, k), 1.0), (pair(n, k, l), 1.0), (pair(n, i, l), -1.0)],
                        Relation::Le,
                        1.0,
                        "gamma",
                    );
                }
            }
        }
    }
    let j = piece.j;
    for &i in target {
        if i != j {
            piece.push(vec![(pair(n, j, i), 1.0)], Relation::Eq, 1.0, "theta");
        }
    }
}

/// Reads a rank list off integral pair variables.
pub(crate) fn decode_pairs(n: usize, x: &[f64], tol: f64) -> Option<RankList> {
    let mut wins = vec![0usize; n];
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let v = x[pair(n, i, k)];
            if (v - v.round()).abs() > tol {
                return None;
            }
            if v > 0.5 {
                wins[i] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| wins[*b].cmp(&wins[*a]));
    let sigma = RankList::from_order(&order).ok()?;
    for i in 0..n {
        for k in 0..n {
            if i != k && sigma.prefers(i, k) != (x[pair(n, i, k)] > 0.5) {
                return None;
            }
        }
    }
    Some(sigma)
}
