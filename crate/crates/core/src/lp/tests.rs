use super::*;
use alloc::vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn single_lower_bound_row() {
    let mut p = LpProblem::minimize(vec![1.0]);
    p.add_row(vec![1.0], Relation::Ge, 3.0);
    let s = solve(&p).unwrap();
    assert!(s.is_optimal());
    assert!(close(s.x[0], 3.0, 1e-12));
    assert!(close(s.objective, 3.0, 1e-12));
    assert!(close(s.duals[0], 1.0, 1e-12));
}

#[test]
fn feasibility_only() {
    let mut p = LpProblem::minimize(vec![0.0, 0.0]);
    p.add_row(vec![1.0, 1.0], Relation::Eq, 1.0);
    let s = solve(&p).unwrap();
    assert!(s.is_optimal());
    assert!(close(s.x[0] + s.x[1], 1.0, 1e-12));
    assert_eq!(s.duals, vec![0.0]);
    assert_eq!(s.basis.len(), 1);
}

#[test]
fn max_with_two_caps() {
    let mut p = LpProblem::maximize(vec![1.0, 1.0]);
    p.add_row(vec![1.0, 0.0], Relation::Le, 1.0);
    p.add_row(vec![0.0, 1.0], Relation::Le, 2.0);
    let s = solve(&p).unwrap();
    assert!(close(s.objective, 3.0, 1e-12));
    assert!(close(s.duals[0], 1.0, 1e-12) && close(s.duals[1], 1.0, 1e-12));
}

#[test]
fn infeasible_and_unbounded() {
    let mut p = LpProblem::minimize(vec![1.0]);
    p.add_row(vec![1.0], Relation::Le, 1.0);
    p.add_row(vec![1.0], Relation::Ge, 2.0);
    let s = solve(&p).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    assert!(s.phase1_objective > 1e-7);

    let mut p = LpProblem::maximize(vec![1.0, -1.0]);
    p.add_row(vec![1.0, -1.0], Relation::Le, 1.0);
    p.set_free(0);
    assert!(close(solve(&p).unwrap().objective, 1.0, 1e-12));

    let mut p = LpProblem::maximize(vec![1.0, 0.0]);
    p.add_row(vec![1.0, -1.0], Relation::Le, 1.0);
    assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    let p = LpProblem::minimize(vec![-1.0]);
    assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn bounds_mirror_and_split() {
    // min x0 - x1 + 2 x2, x0 ∈ [-2, 3], x1 ≤ 4, x2 free, x2 ≥ x0 - 1
    let mut p = LpProblem::minimize(vec![1.0, -1.0, 2.0]);
    p.set_bounds(0, -2.0, 3.0);
    p.set_bounds(1, f64::NEG_INFINITY, 4.0);
    p.set_free(2);
    p.add_row(vec![-1.0, 0.0, 1.0], Relation::Ge, -1.0);
    let s = solve(&p).unwrap();
    assert!(close(s.x[1], 4.0, 1e-12));
    // objective x0 + 2(x0 - 1) - 4 minimized at x0 = -2
    assert!(close(s.x[0], -2.0, 1e-12));
    assert!(close(s.x[2], -3.0, 1e-12));
    assert!(close(s.objective, -2.0 - 4.0 - 6.0, 1e-12));
    assert!(close(s.duals[0], 2.0, 1e-12));
}

#[test]
fn redundant_equalities() {
    let mut p = LpProblem::minimize(vec![1.0, 2.0, 3.0]);
    p.add_row(vec![1.0, 1.0, 1.0], Relation::Eq, 1.0);
    p.add_row(vec![2.0, 2.0, 2.0], Relation::Eq, 2.0);
    p.add_row(vec![0.0, 1.0, 1.0], Relation::Ge, 0.5);
    let s = solve(&p).unwrap();
    assert!(close(s.objective, 0.5 + 1.0, 1e-12));
    assert!(s.primal_residual < 1e-9);
    assert!(s.duality_gap < 1e-9);
}

#[test]
fn redundant_row_after_other_rows() {
    // The dependent equality is last, so its artificial is stuck in a row the
    // earlier pivots have already mixed.
    let mut p = LpProblem::minimize(vec![3.0, 1.0, 2.0, 1.0]);
    p.add_row(vec![1.0, 1.0, 0.0, 0.0], Relation::Eq, 0.6);
    p.add_row(vec![0.0, 0.0, 1.0, 1.0], Relation::Eq, 0.4);
    p.add_row(vec![1.0, 0.0, 1.0, 0.0], Relation::Le, 0.5);
    p.add_row(vec![1.0, 1.0, 1.0, 1.0], Relation::Eq, 1.0);
    let s = solve(&p).unwrap();
    assert!(close(s.objective, 1.0, 1e-12));
    assert!(s.primal_residual < 1e-9);
    assert!(s.duality_gap < 1e-9);
}

#[test]
fn degenerate_problem_terminates() {
    // A classic cycling example for the textbook largest-coefficient rule.
    let mut p = LpProblem::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
    p.add_row(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
    p.add_row(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
    p.add_row(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
    let s = solve(&p).unwrap();
    assert!(close(s.objective, -0.05, 1e-12));
}

#[test]
fn dump_format() {
    let mut p = LpProblem::maximize(vec![1.0, -2.0]);
    p.add_row(vec![1.0, 1.0], Relation::Le, 4.0);
    p.set_free(1);
    let text = alloc::format!("{p}");
    assert_eq!(
        text,
        "maximize\n  obj: 1 x0 - 2 x1\nsubject to\n  r0: 1 x0 + 1 x1 <= 4\nbounds\n  0 <= x0 <= inf\n  -inf <= x1 <= inf\nend\n"
    );
}

#[test]
fn rejects_malformed() {
    let mut p = LpProblem::minimize(vec![1.0, 1.0]);
    p.add_row(vec![1.0], Relation::Le, 1.0);
    assert!(matches!(solve(&p), Err(crate::Error::MalformedLp(_))));
    let mut p = LpProblem::minimize(vec![1.0]);
    p.add_row(vec![1.0], Relation::Le, f64::INFINITY);
    assert!(solve(&p).is_err());
    let mut p = LpProblem::minimize(vec![1.0]);
    p.set_bounds(0, 2.0, 1.0);
    assert!(solve(&p).is_err());
}

/// A random feasible, bounded LP: every variable is boxed, either through its
/// bounds or through explicit rows, around a known feasible point.
fn random_lp(rng: &mut ChaCha8Rng) -> LpProblem {
    let n = rng.random_range(1..=7);
    let m = rng.random_range(1..=7);
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let cost: Vec<f64> = (0..n).map(|_| rng.random_range(-5i32..=5) as f64).collect();
    let dir = if rng.random_bool(0.5) { Direction::Minimize } else { Direction::Maximize };
    let mut p = LpProblem::new(dir, cost);
    for _ in 0..m {
        let a: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-4i32..=4) as f64 })
            .collect();
        let ax: f64 = a.iter().zip(&x0).map(|(a, x)| a * x).sum();
        match rng.random_range(0..3) {
            0 => p.add_row(a, Relation::Le, ax + rng.random_range(0.0..2.0)),
            1 => p.add_row(a, Relation::Ge, ax - rng.random_range(0.0..2.0)),
            _ => p.add_row(a, Relation::Eq, ax),
        };
    }
    for j in 0..n {
        let lo = x0[j] - rng.random_range(0.0..3.0);
        let hi = x0[j] + rng.random_range(0.0..3.0);
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        match rng.random_range(0..3) {
            0 => p.set_bounds(j, lo, hi),
            1 => {
                p.set_bounds(j, f64::NEG_INFINITY, hi);
                p.add_row(unit, Relation::Ge, lo);
            }
            _ => {
                p.set_free(j);
                p.add_row(unit.clone(), Relation::Ge, lo);
                p.add_row(unit, Relation::Le, hi);
            }
        }
    }
    p
}

/// Moves every finite bound into an explicit row, leaving all variables free.
fn explicit_rows(p: &LpProblem) -> LpProblem {
    let n = p.num_vars();
    let mut q = LpProblem::new(p.direction, p.cost.clone());
    q.rows = p.rows.clone();
    for j in 0..n {
        q.set_free(j);
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        if p.lower[j].is_finite() {
            q.add_row(unit.clone(), Relation::Ge, p.lower[j]);
        }
        if p.upper[j].is_finite() {
            q.add_row(unit, Relation::Le, p.upper[j]);
        }
    }
    q
}

/// The LP dual of a problem whose variables are all free.
fn explicit_dual(q: &LpProblem) -> LpProblem {
    let (n, m) = (q.num_vars(), q.num_rows());
    let b: Vec<f64> = q.rows.iter().map(|r| r.rhs).collect();
    let (dir, sign_ge) = match q.direction {
        Direction::Minimize => (Direction::Maximize, 1.0),
        Direction::Maximize => (Direction::Minimize, -1.0),
    };
    let mut d = LpProblem::new(dir, b);
    for i in 0..m {
        let (lo, hi) = match q.rows[i].rel {
            Relation::Eq => (f64::NEG_INFINITY, f64::INFINITY),
            Relation::Ge if sign_ge > 0.0 => (0.0, f64::INFINITY),
            Relation::Le if sign_ge < 0.0 => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, 0.0),
        };
        d.set_bounds(i, lo, hi);
    }
    for j in 0..n {
        let col: Vec<f64> = q.rows.iter().map(|r| r.coeffs[j]).collect();
        d.add_row(col, Relation::Eq, q.cost[j]);
    }
    d
}

#[test]
fn strong_duality_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let p = random_lp(&mut rng);
        let s = solve(&p).unwrap();
        assert!(s.is_optimal(), "{p}");
        assert!(s.primal_residual <= 1e-7);
        let q = explicit_rows(&p);
        let sq = solve(&q).unwrap();
        assert!(close(s.objective, sq.objective, 1e-6));
        let by_duals: f64 = sq.duals.iter().zip(&q.rows).map(|(y, r)| y * r.rhs).sum();
        assert!(close(by_duals, sq.objective, 1e-6));
        let d = solve(&explicit_dual(&q)).unwrap();
        assert!(d.is_optimal());
        assert!(close(d.objective, s.objective, 1e-6), "{} vs {}", d.objective, s.objective);
    }
}
