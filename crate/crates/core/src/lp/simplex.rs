use alloc::string::String;
use alloc::vec::Vec;

use super::lu::Lu;
use super::{Direction, LpProblem, LpSolution, LpStatus, Relation};
use crate::{Error, Result};

/// Tolerances and limits for [`solve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Smallest admissible pivot magnitude.
    pub pivot_tol: f64,
    /// A reduced cost below `-opt_tol` makes a column eligible to enter.
    pub opt_tol: f64,
    /// Phase-1 optimum (scaled by `1 + ‖b‖∞`) above this means infeasible;
    /// also the primal residual bound.
    pub feas_tol: f64,
    /// Pivot budget; `None` uses `50·(m+n) + 10000`.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-9,
            opt_tol: 1e-9,
            feas_tol: 1e-7,
            max_iterations: None,
        }
    }
}

const DEGENERATE_STEP: f64 = 1e-12;
const DROP_TOL: f64 = 1e-14;
const MAX_REINVERSIONS: usize = 6;
const PERTURBATION: f64 = 1e-7;
/// Smallest entry an artificial may be pivoted out on; rows without one are
/// treated as redundant.
const DRIVE_OUT_TOL: f64 = 1e-7;

/// Solves with default options.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    solve_with(problem, &SolverOptions::default())
}

#[derive(Clone, Copy)]
enum VarMap {
    Shift { col: usize, lo: f64 },
    Mirror { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

/// `min cᵀx  s.t.  A x = b, x ≥ 0`, with an initial identity basis.
struct Standard {
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    artificial: Vec<bool>,
    /// Row owning each artificial column.
    art_row: Vec<usize>,
    /// Multiplier applied to each original row (±1).
    row_sign: Vec<f64>,
    map: Vec<VarMap>,
    basis: Vec<usize>,
}

impl Standard {
    fn build(p: &LpProblem) -> Self {
        let nv = p.num_vars();
        let flip = match p.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        };
        let mut map = Vec::with_capacity(nv);
        let mut ns = 0;
        for j in 0..nv {
            let (lo, hi) = (p.lower[j], p.upper[j]);
            map.push(if lo.is_finite() {
                ns += 1;
                VarMap::Shift { col: ns - 1, lo }
            } else if hi.is_finite() {
                ns += 1;
                VarMap::Mirror { col: ns - 1, hi }
            } else {
                ns += 2;
                VarMap::Split {
                    pos: ns - 2,
                    neg: ns - 1,
                }
            });
        }

        // General rows over the structural columns, then upper-bound rows.
        let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(p.num_rows() + nv);
        for row in &p.rows {
            let mut coeffs = alloc::vec![0.0; ns];
            let mut rhs = row.rhs;
            for (j, &a) in row.coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                match map[j] {
                    VarMap::Shift { col, lo } => {
                        coeffs[col] += a;
                        rhs -= a * lo;
                    }
                    VarMap::Mirror { col, hi } => {
                        coeffs[col] -= a;
                        rhs -= a * hi;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[pos] += a;
                        coeffs[neg] -= a;
                    }
                }
            }
            rows.push((coeffs, row.rel, rhs));
        }
        for j in 0..nv {
            if let VarMap::Shift { col, lo } = map[j] {
                if p.upper[j].is_finite() {
                    let mut coeffs = alloc::vec![0.0; ns];
                    coeffs[col] = 1.0;
                    rows.push((coeffs, Relation::Le, p.upper[j] - lo));
                }
            }
        }

        let m = rows.len();
        let mut row_sign = alloc::vec![1.0; m];
        for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
            let negate = match rel {
                Relation::Ge => *rhs <= 0.0,
                _ => *rhs < 0.0,
            };
            if negate {
                row_sign[i] = -1.0;
                coeffs.iter_mut().for_each(|a| *a = -*a);
                *rhs = -*rhs;
                *rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let n = ns + n_slack + n_art;
        let mut a = alloc::vec![0.0; m * n];
        let mut b = alloc::vec![0.0; m];
        let mut basis = alloc::vec![0; m];
        let mut artificial = alloc::vec![false; n];
        let mut art_row = alloc::vec![usize::MAX; n];
        let (mut next_slack, mut next_art) = (ns, ns + n_slack);
        for (i, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
            a[i * n..i * n + ns].copy_from_slice(&coeffs);
            b[i] = rhs;
            match rel {
                Relation::Le => {
                    a[i * n + next_slack] = 1.0;
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge | Relation::Eq => {
                    if rel == Relation::Ge {
                        a[i * n + next_slack] = -1.0;
                        next_slack += 1;
                    }
                    a[i * n + next_art] = 1.0;
                    artificial[next_art] = true;
                    art_row[next_art] = i;
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        let mut c = alloc::vec![0.0; n];
        for (j, &cj) in p.cost.iter().enumerate() {
            let cj = flip * cj;
            match map[j] {
                VarMap::Shift { col, .. } => c[col] += cj,
                VarMap::Mirror { col, .. } => c[col] -= cj,
                VarMap::Split { pos, neg } => {
                    c[pos] += cj;
                    c[neg] -= cj;
                }
            }
        }
        Self {
            m,
            n,
            a,
            b,
            c,
            artificial,
            art_row,
            row_sign,
            map,
            basis,
        }
    }

    fn b_norm(&self) -> f64 {
        self.b.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Dense tableau `B⁻¹[A | b]` over the retained rows, with reduced costs.
struct Tableau {
    m: usize,
    n: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    d: Vec<f64>,
    basis: Vec<usize>,
    /// Retained standard-form rows. Their order matches nothing in the
    /// tableau; it only fixes the row order of the basis matrix.
    rows: Vec<usize>,
    allowed: Vec<bool>,
    pivot_row: Vec<f64>,
    nz: Vec<usize>,
    /// Unperturbed right-hand side while `rhs` carries a perturbation.
    truth: Option<Vec<f64>>,
}

impl Tableau {
    fn new(s: &Standard) -> Self {
        Self {
            m: s.m,
            n: s.n,
            t: s.a.clone(),
            rhs: s.b.clone(),
            d: alloc::vec![0.0; s.n],
            basis: s.basis.clone(),
            rows: (0..s.m).collect(),
            allowed: alloc::vec![true; s.n],
            pivot_row: alloc::vec![0.0; s.n],
            nz: Vec::with_capacity(s.n),
            truth: None,
        }
    }

    fn price(&mut self, cost: &[f64]) {
        let n = self.n;
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * n..(i + 1) * n];
                for (dj, &tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
        for &q in &self.basis {
            self.d[q] = 0.0;
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n;
        let inv = 1.0 / self.t[r * n + q];
        self.nz.clear();
        for j in 0..n {
            let v = self.t[r * n + j] * inv;
            let v = if v.abs() < DROP_TOL { 0.0 } else { v };
            self.t[r * n + j] = v;
            self.pivot_row[j] = v;
            if v != 0.0 {
                self.nz.push(j);
            }
        }
        self.t[r * n + q] = 1.0;
        self.pivot_row[q] = 1.0;
        self.rhs[r] *= inv;
        let pr = self.rhs[r];
        if let Some(truth) = self.truth.as_mut() {
            truth[r] *= inv;
            let tr = truth[r];
            for i in 0..self.m {
                if i != r {
                    let f = self.t[i * n + q];
                    if f != 0.0 {
                        truth[i] -= f * tr;
                    }
                }
            }
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * n + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * n..(i + 1) * n];
            for &j in &self.nz {
                let v = row[j] - f * self.pivot_row[j];
                row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            row[q] = 0.0;
            let v = self.rhs[i] - f * pr;
            self.rhs[i] = if v < 0.0 && v > -DROP_TOL * 1e3 { 0.0 } else { v };
        }
        let f = self.d[q];
        if f != 0.0 {
            for &j in &self.nz {
                self.d[j] -= f * self.pivot_row[j];
            }
        }
        self.d[q] = 0.0;
        self.basis[r] = q;
    }

    /// Shifts every basic value up by a small, row-dependent amount so that
    /// ratio-test ties become rare.
    fn perturb(&mut self) {
        let truth = self.rhs.clone();
        let mut h = 0.0f64;
        for v in self.rhs.iter_mut() {
            h = (h + 0.618_033_988_749_895) % 1.0;
            *v += PERTURBATION * (1.0 + v.abs()) * (1.0 + h);
        }
        self.truth = Some(truth);
    }

    /// Drops the perturbation; basic values may turn slightly negative.
    fn unperturb(&mut self) {
        if let Some(truth) = self.truth.take() {
            self.rhs = truth;
        }
    }

    /// Dual simplex from a dual feasible basis until the basic values are
    /// nonnegative (within `tol`). Returns `false` if a row proves
    /// infeasibility.
    fn run_dual(&mut self, opts: &SolverOptions, tol: f64, iterations: &mut usize, cap: usize) -> Result<bool> {
        let n = self.n;
        loop {
            let mut leave = None;
            let mut worst = -tol;
            for i in 0..self.m {
                if self.rhs[i] < worst {
                    worst = self.rhs[i];
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return Ok(true);
            };
            let mut enter: Option<(usize, f64, f64)> = None;
            for j in 0..n {
                let a = self.t[r * n + j];
                if !self.allowed[j] || a >= -opts.pivot_tol {
                    continue;
                }
                let ratio = self.d[j].max(0.0) / -a;
                enter = match enter {
                    Some((_, best, pa)) if ratio > best + 1e-12 || (ratio >= best - 1e-12 && -a <= pa) => enter,
                    _ => Some((j, ratio, -a)),
                };
            }
            let Some((q, _, _)) = enter else {
                return Ok(false);
            };
            *iterations += 1;
            if *iterations > cap {
                return Err(Error::IterationLimit(cap));
            }
            self.pivot(r, q);
        }
    }

    /// Drops tableau row `r`, whose basic artificial belongs to the redundant
    /// standard-form row `origin`.
    fn remove_row(&mut self, r: usize, origin: usize) {
        let n = self.n;
        self.t.drain(r * n..(r + 1) * n);
        self.rhs.remove(r);
        self.basis.remove(r);
        self.rows.retain(|&ri| ri != origin);
        self.m -= 1;
    }

    /// Primal simplex from the current basis. Dantzig pricing, falling back to
    /// Bland's rule for the remainder of any degenerate run.
    fn run(&mut self, opts: &SolverOptions, iterations: &mut usize, cap: usize) -> Result<Outcome> {
        let n = self.n;
        let mut bland = false;
        #[cfg(debug_assertions)]
        let mut seen: alloc::collections::BTreeSet<Vec<usize>> = Default::default();
        loop {
            let entering = if bland {
                (0..n).find(|&j| self.allowed[j] && self.d[j] < -opts.opt_tol)
            } else {
                let mut best = None;
                let mut best_d = -opts.opt_tol;
                for j in 0..n {
                    if self.allowed[j] && self.d[j] < best_d {
                        best_d = self.d[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(q) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i * n + q];
                if a <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio, a)),
                    Some((r, best, pa)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best);
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                a > pa
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((i, ratio, a))
                        } else {
                            Some((r, best, pa))
                        }
                    }
                };
            }
            let Some((r, step, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            *iterations += 1;
            if *iterations > cap {
                return Err(Error::IterationLimit(cap));
            }
            self.pivot(r, q);
            if step <= DEGENERATE_STEP {
                #[cfg(debug_assertions)]
                {
                    if !bland {
                        seen.clear();
                    }
                    let mut key = self.basis.clone();
                    key.sort_unstable();
                    debug_assert!(seen.insert(key), "simplex revisited a basis");
                }
                bland = true;
            } else {
                bland = false;
            }
        }
    }

    /// Recomputes the tableau from the standard form and the current basis.
    /// Returns `false` if the basis matrix is singular.
    fn reinvert(&mut self, s: &Standard, cost: &[f64]) -> bool {
        let Some(lu) = self.factor(s) else {
            return false;
        };
        let (m, n) = (self.m, self.n);
        let mut col = alloc::vec![0.0; m];
        for j in 0..n {
            for (k, &ri) in self.rows.iter().enumerate() {
                col[k] = s.a[ri * s.n + j];
            }
            let z = lu.solve(&col);
            for i in 0..m {
                self.t[i * n + j] = if z[i].abs() < DROP_TOL { 0.0 } else { z[i] };
            }
        }
        let b: Vec<f64> = self.rows.iter().map(|&ri| s.b[ri]).collect();
        self.rhs = lu.solve(&b);
        for (i, &q) in self.basis.iter().enumerate() {
            for k in 0..m {
                self.t[k * n + q] = if k == i { 1.0 } else { 0.0 };
            }
        }
        self.price(cost);
        true
    }

    fn factor(&self, s: &Standard) -> Option<Lu> {
        let m = self.m;
        let mut bm = alloc::vec![0.0; m * m];
        for (k, &ri) in self.rows.iter().enumerate() {
            for (i, &q) in self.basis.iter().enumerate() {
                bm[k * m + i] = s.a[ri * s.n + q];
            }
        }
        Lu::factor(m, bm)
    }
}

/// Solves `problem` with the two-phase dense simplex.
pub fn solve_with(problem: &LpProblem, opts: &SolverOptions) -> Result<LpSolution> {
    problem.validate()?;
    let s = Standard::build(problem);
    let cap = opts
        .max_iterations
        .unwrap_or(50 * (s.m + s.n) + 10_000);
    let mut tab = Tableau::new(&s);
    let mut iterations = 0;

    // Phase 1.
    let cost1: Vec<f64> = s.artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    let has_artificials = s.artificial.iter().any(|&a| a);
    let mut phase1_objective = 0.0;
    if has_artificials {
        tab.price(&cost1);
        tab.run(opts, &mut iterations, cap)?;
        phase1_objective = (0..tab.m)
            .filter(|&i| s.artificial[tab.basis[i]])
            .map(|i| tab.rhs[i].max(0.0))
            .sum();
        if phase1_objective > opts.feas_tol * (1.0 + s.b_norm()) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::NAN,
                duals: Vec::new(),
                basis: Vec::new(),
                iterations,
                phase1_objective,
                primal_residual: f64::NAN,
                duality_gap: f64::NAN,
                message: alloc::format!("phase-1 optimum {phase1_objective:.3e}"),
            });
        }
        // Drive remaining artificials out of the basis or drop redundant rows.
        let mut r = 0;
        while r < tab.m {
            if !s.artificial[tab.basis[r]] {
                r += 1;
                continue;
            }
            let n = tab.n;
            let best = (0..n)
                .filter(|&j| !s.artificial[j])
                .map(|j| (j, tab.t[r * n + j].abs()))
                .filter(|&(_, v)| v > DRIVE_OUT_TOL)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((q, _)) => {
                    tab.rhs[r] = 0.0;
                    tab.pivot(r, q);
                    r += 1;
                }
                None => {
                    let origin = s.art_row[tab.basis[r]];
                    tab.remove_row(r, origin)
                }
            }
        }
        for (j, &art) in s.artificial.iter().enumerate() {
            tab.allowed[j] = !art;
        }
    }

    // Phase 2 on a perturbed right-hand side, then a dual simplex pass to
    // restore feasibility for the true one, then reinversion whenever
    // accumulated error spoils the basis.
    tab.price(&s.c);
    tab.perturb();
    let mut outcome = tab.run(opts, &mut iterations, cap)?;
    tab.unperturb();
    if let Outcome::Unbounded = outcome {
        // Confirm on a freshly computed tableau.
        if tab.reinvert(&s, &s.c) {
            outcome = tab.run(opts, &mut iterations, cap)?;
        }
    }
    if let Outcome::Optimal = outcome {
        let tol = 1e-9 * (1.0 + s.b_norm());
        if !tab.run_dual(opts, tol, &mut iterations, cap)? {
            return Err(Error::Numerical("dual simplex cleanup found an infeasible row".into()));
        }
    }
    let mut reinversions = 0;
    let mut first = true;
    loop {
        if !first {
            outcome = tab.run(opts, &mut iterations, cap)?;
        }
        first = false;
        if let Outcome::Unbounded = outcome {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: Vec::new(),
                objective: match problem.direction {
                    Direction::Minimize => f64::NEG_INFINITY,
                    Direction::Maximize => f64::INFINITY,
                },
                duals: Vec::new(),
                basis: tab.basis.clone(),
                iterations,
                phase1_objective,
                primal_residual: f64::NAN,
                duality_gap: f64::NAN,
                message: String::from("objective unbounded"),
            });
        }
        let Some(lu) = tab.factor(&s) else {
            return Err(Error::Numerical("singular optimal basis".into()));
        };
        let b: Vec<f64> = tab.rows.iter().map(|&ri| s.b[ri]).collect();
        let xb = lu.solve(&b);
        let cb: Vec<f64> = tab.basis.iter().map(|&q| s.c[q]).collect();
        let y = lu.solve_transpose(&cb);
        let mut worst_d: f64 = 0.0;
        for j in (0..s.n).filter(|&j| tab.allowed[j]) {
            let mut dj = s.c[j];
            for (k, &ri) in tab.rows.iter().enumerate() {
                dj -= y[k] * s.a[ri * s.n + j];
            }
            worst_d = worst_d.min(dj);
        }
        let worst_x = xb.iter().fold(0.0f64, |m, &v| m.min(v));
        let scale = 1.0 + s.b_norm();
        if worst_d >= -opts.opt_tol * 10.0 && worst_x >= -opts.feas_tol * scale {
            return finish(problem, &s, &tab, xb, y, iterations, phase1_objective, opts);
        }
        reinversions += 1;
        if reinversions > MAX_REINVERSIONS || !tab.reinvert(&s, &s.c) {
            return Err(Error::Numerical(alloc::format!(
                "basis not optimal after refinement (reduced cost {worst_d:.3e}, x {worst_x:.3e})"
            )));
        }
        let tol = 1e-9 * (1.0 + s.b_norm());
        if !tab.run_dual(opts, tol, &mut iterations, cap)? {
            return Err(Error::Numerical("reinverted basis is not repairable".into()));
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &LpProblem,
    s: &Standard,
    tab: &Tableau,
    xb: Vec<f64>,
    y: Vec<f64>,
    iterations: usize,
    phase1_objective: f64,
    opts: &SolverOptions,
) -> Result<LpSolution> {
    let mut xs = alloc::vec![0.0; s.n];
    for (k, &q) in tab.basis.iter().enumerate() {
        xs[q] = xb[k].max(0.0);
    }
    let scale = 1.0 + s.b_norm();
    let mut residual: f64 = 0.0;
    for i in 0..s.m {
        let lhs: f64 = s.a[i * s.n..(i + 1) * s.n].iter().zip(&xs).map(|(a, x)| a * x).sum();
        residual = residual.max((lhs - s.b[i]).abs());
    }
    if residual > opts.feas_tol * scale {
        return Err(Error::Numerical(alloc::format!(
            "primal residual {residual:.3e} after refinement"
        )));
    }
    let x: Vec<f64> = s
        .map
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, lo } => lo + xs[col],
            VarMap::Mirror { col, hi } => hi - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect();
    let flip = match problem.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let mut ystd = alloc::vec![0.0; s.m];
    for (k, &ri) in tab.rows.iter().enumerate() {
        ystd[ri] = y[k];
    }
    let duals: Vec<f64> = (0..problem.num_rows())
        .map(|i| flip * s.row_sign[i] * ystd[i])
        .collect();
    let primal_std: f64 = s.c.iter().zip(&xs).map(|(c, x)| c * x).sum();
    let dual_std: f64 = ystd.iter().zip(&s.b).map(|(y, b)| y * b).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: problem.objective_at(&x),
        primal_residual: problem.max_violation(&x),
        x,
        duals,
        basis: tab.basis.clone(),
        iterations,
        phase1_objective,
        duality_gap: (primal_std - dual_std).abs(),
        message: String::new(),
    })
}
