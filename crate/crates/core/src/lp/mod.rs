//! Dense two-phase primal simplex.
//!
//! Problems are stated in general form (row relations, bounded or free
//! variables) and brought into standard form internally. Solutions carry
//! primal values, row duals (∂objective/∂rhs) and the final basis.

pub(crate) mod lu;
mod simplex;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use simplex::{solve, solve_with, SolverOptions};

use crate::{Error, Result};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Relation of a constraint row to its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// One constraint row `coeffs · x (rel) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

/// A linear program over `x ∈ ℝⁿ` with per-variable bounds
/// (default `0 ≤ x_j < ∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub direction: Direction,
    pub cost: Vec<f64>,
    pub rows: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(direction: Direction, cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self {
            direction,
            cost,
            rows: Vec::new(),
            lower: alloc::vec![0.0; n],
            upper: alloc::vec![f64::INFINITY; n],
        }
    }

    pub fn minimize(cost: Vec<f64>) -> Self {
        Self::new(Direction::Minimize, cost)
    }

    pub fn maximize(cost: Vec<f64>) -> Self {
        Self::new(Direction::Maximize, cost)
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a row and returns its index.
    pub fn add_row(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) -> usize {
        self.rows.push(Constraint { coeffs, rel, rhs });
        self.rows.len() - 1
    }

    /// Appends a row given as `(variable, coefficient)` pairs.
    pub fn add_sparse_row(&mut self, terms: &[(usize, f64)], rel: Relation, rhs: f64) -> usize {
        let mut coeffs = alloc::vec![0.0; self.num_vars()];
        for &(j, v) in terms {
            coeffs[j] += v;
        }
        self.add_row(coeffs, rel, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY);
    }

    /// Checks widths, finiteness and bound consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::MalformedLp("bound vectors have the wrong length".into()));
        }
        if self.cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp("non-finite cost".into()));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::MalformedLp(alloc::format!("bad bounds [{l}, {u}] on x{j}")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::MalformedLp(alloc::format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedLp(alloc::format!("row {i} is not finite")));
            }
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match row.rel {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Plain-text dump:
///
/// ```text
/// minimize
///   obj: 1 x0 + 2 x1
/// subject to
///   r0: 1 x0 + 1 x1 >= 3
/// bounds
///   0 <= x0 <= inf
///   -inf <= x1 <= inf
/// end
/// ```
impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn terms(f: &mut fmt::Formatter<'_>, coeffs: &[f64]) -> fmt::Result {
            let mut first = true;
            for (j, &a) in coeffs.iter().enumerate().filter(|(_, a)| **a != 0.0) {
                if first {
                    write!(f, "{a} x{j}")?;
                } else if a < 0.0 {
                    write!(f, " - {} x{j}", -a)?;
                } else {
                    write!(f, " + {a} x{j}")?;
                }
                first = false;
            }
            if first {
                f.write_str("0")?;
            }
            Ok(())
        }
        f.write_str(match self.direction {
            Direction::Minimize => "minimize\n  obj: ",
            Direction::Maximize => "maximize\n  obj: ",
        })?;
        terms(f, &self.cost)?;
        f.write_str("\nsubject to\n")?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(f, "  r{i}: ")?;
            terms(f, &row.coeffs)?;
            writeln!(f, " {} {}", row.rel, row.rhs)?;
        }
        f.write_str("bounds\n")?;
        for j in 0..self.num_vars() {
            writeln!(f, "  {} <= x{j} <= {}", self.lower[j], self.upper[j])?;
        }
        f.write_str("end\n")
    }
}

/// Outcome class of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve`].
///
/// For `Optimal`, `x` is a basic optimal solution, `objective = cᵀx` and
/// `duals[i] = ∂objective/∂rhs_i`. `basis` lists the basic columns of the
/// internal standard form (one per retained row).
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: Vec<f64>,
    pub basis: Vec<usize>,
    pub iterations: usize,
    /// Optimal phase-1 objective (sum of artificials); positive beyond
    /// tolerance certifies infeasibility.
    pub phase1_objective: f64,
    /// Largest row or bound violation of `x` in the original problem.
    pub primal_residual: f64,
    /// `|cᵀx − dual objective|`.
    pub duality_gap: f64,
    pub message: String,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[cfg(test)]
mod tests;
