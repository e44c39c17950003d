use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fit::SUBSET_SUM_TOL;
use crate::choice::{ObservationScheme, SparseChoiceModel};
use crate::{Error, Result};

/// Largest support and coefficient bound searched exhaustively.
pub const MAX_EXHAUSTIVE: usize = 12;

/// Half-enumerations larger than this fall back to random probing.
const HALF_BUDGET: usize = 1 << 22;
const PROBES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    /// For each atom (in model order), a row where only that atom has a 1.
    pub rows: Vec<Option<usize>>,
}

impl SignatureReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Independence {
    /// Every nonzero `c` with `|c_i| ≤ C` was checked.
    Satisfied,
    /// `Σ c_i λ_i` vanishes within tolerance.
    Violated { c: Vec<i64> },
    /// Only random probes were tried and none vanished.
    NotFalsified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    /// Coefficient bound `C`.
    pub bound: usize,
    pub result: Independence,
}

impl IndependenceReport {
    pub fn ok(&self) -> bool {
        self.result == Independence::Satisfied
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub signature: SignatureReport,
    pub independence: IndependenceReport,
}

impl ConditionReport {
    /// Both conditions verified, so the sparsest fit must recover the model.
    pub fn ok(&self) -> bool {
        self.signature.ok() && self.independence.ok()
    }
}

/// For each atom of `model`, the first row of `scheme` where its column is 1
/// and every other atom's column is 0.
pub fn check_signature(model: &SparseChoiceModel, scheme: &ObservationScheme) -> Result<SignatureReport> {
    if model.n() != scheme.n() {
        return Err(Error::DimensionMismatch {
            expected: scheme.n(),
            got: model.n(),
        });
    }
    let columns = model
        .atoms()
        .iter()
        .map(|a| scheme.a_column(&a.ranks))
        .collect::<Result<Vec<_>>>()?;
    let hits: Vec<usize> = (0..scheme.m()).map(|d| columns.iter().map(|c| c[d] as usize).sum()).collect();
    let rows = columns
        .iter()
        .map(|c| (0..scheme.m()).find(|&d| c[d] == 1 && hits[d] == 1))
        .collect();
    Ok(SignatureReport { rows })
}

/// Searches for integers `|c_i| ≤ C`, not all zero, with `Σ c_i λ_i = 0`
/// (within the subset-sum tolerance). `C` defaults to the support size.
///
/// The search is exhaustive, by meet in the middle, when `K, C ≤ 12` and each
/// half fits in memory; otherwise random `c` are probed and a clean run only
/// reports `NotFalsified`.
pub fn check_linear_independence(model: &SparseChoiceModel, bound: Option<usize>) -> IndependenceReport {
    let lambda: Vec<f64> = model.atoms().iter().map(|a| a.prob).collect();
    let bound = bound.unwrap_or(lambda.len()).max(1);
    IndependenceReport {
        bound,
        result: independence(&lambda, bound),
    }
}

pub fn check_conditions(
    model: &SparseChoiceModel,
    scheme: &ObservationScheme,
    bound: Option<usize>,
) -> Result<ConditionReport> {
    Ok(ConditionReport {
        signature: check_signature(model, scheme)?,
        independence: check_linear_independence(model, bound),
    })
}

fn independence(lambda: &[f64], c: usize) -> Independence {
    let k = lambda.len();
    let base = 2 * c + 1;
    let half = k.div_ceil(2);
    let size = base.checked_pow(half as u32).unwrap_or(usize::MAX);
    if k <= MAX_EXHAUSTIVE && c <= MAX_EXHAUSTIVE && size <= HALF_BUDGET {
        meet_in_the_middle(lambda, c)
    } else {
        probe(lambda, c)
    }
}

/// Coefficient vector number `code` in base `2c+1`, digits shifted to `-c..=c`.
fn digits(mut code: usize, len: usize, c: usize) -> Vec<i64> {
    let base = 2 * c + 1;
    (0..len)
        .map(|_| {
            let d = code % base;
            code /= base;
            d as i64 - c as i64
        })
        .collect()
}

fn half_sums(lambda: &[f64], c: usize) -> Vec<(f64, usize)> {
    let base = 2 * c + 1;
    let mut sums = vec![(0.0, 0)];
    let mut place = 1;
    for &l in lambda {
        let mut next = Vec::with_capacity(sums.len() * base);
        for &(s, code) in &sums {
            for d in 0..base {
                next.push((s + (d as f64 - c as f64) * l, code + d * place));
            }
        }
        sums = next;
        place *= base;
    }
    sums
}

fn meet_in_the_middle(lambda: &[f64], c: usize) -> Independence {
    let (left, right) = lambda.split_at(lambda.len() / 2);
    let ls = half_sums(left, c);
    let mut rs = half_sums(right, c);
    rs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zero_left = digits_zero(left.len(), c);
    let zero_right = digits_zero(right.len(), c);
    for &(s, lcode) in &ls {
        let start = rs.partition_point(|r| r.0 < -s - SUBSET_SUM_TOL);
        for &(t, rcode) in rs[start..].iter().take_while(|r| r.0 <= -s + SUBSET_SUM_TOL) {
            if (s + t).abs() <= SUBSET_SUM_TOL && !(lcode == zero_left && rcode == zero_right) {
                let mut coef = digits(lcode, left.len(), c);
                coef.extend(digits(rcode, right.len(), c));
                return Independence::Violated { c: coef };
            }
        }
    }
    Independence::Satisfied
}

/// Code of the all-zero coefficient vector.
fn digits_zero(len: usize, c: usize) -> usize {
    let base = 2 * c + 1;
    (0..len).fold((0, 1), |(code, place), _| (code + c * place, place * base)).0
}

fn probe(lambda: &[f64], c: usize) -> Independence {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = c as i64;
    for _ in 0..PROBES {
        let coef: Vec<i64> = lambda.iter().map(|_| rng.random_range(-c..=c)).collect();
        if coef.iter().all(|&x| x == 0) {
            continue;
        }
        let s: f64 = coef.iter().zip(lambda).map(|(&x, &l)| x as f64 * l).sum();
        if s.abs() <= SUBSET_SUM_TOL {
            return Independence::Violated { c: coef };
        }
    }
    Independence::NotFalsified
}
