use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::choice::{exact_marginals, DataVector, ObservationScheme, RankList, RowIndex, SchemeKind, SparseChoiceModel};
use crate::{Error, Result};

/// Absolute tolerance of the subset-sum test and of the reconstruction check.
pub const SUBSET_SUM_TOL: f64 = 1e-9;

/// Nodes the subset-sum search may visit for a single row before giving up.
const SEARCH_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitStatus {
    Recovered,
    ConditionViolated {
        /// Offending data row, when one row is to blame.
        #[serde(skip_serializing_if = "Option::is_none")]
        row: Option<usize>,
        reason: String,
    },
}

/// One support atom found by the fit, in order of discovery (increasing mass).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredAtom {
    pub prob: f64,
    /// The row whose value introduced this atom.
    pub signature_row: usize,
    /// Recovered column `A(σ)`.
    pub column: Vec<u8>,
    /// Decoded rank list, if the column decodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<RankList>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsestFitOutput {
    #[serde(flatten)]
    pub status: FitStatus,
    pub atoms: Vec<RecoveredAtom>,
    /// Present only when `status` is `Recovered`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<SparseChoiceModel>,
}

impl SparsestFitOutput {
    pub fn is_recovered(&self) -> bool {
        self.status == FitStatus::Recovered
    }

    fn violated(atoms: Vec<RecoveredAtom>, row: Option<usize>, reason: String) -> Self {
        Self {
            status: FitStatus::ConditionViolated { row, reason },
            atoms,
            model: None,
        }
    }
}

/// Recovers the sparsest model consistent with noiseless data `y`.
///
/// Rows are visited in increasing order of value. A row whose value is a
/// subset sum of the masses found so far marks that subset; any other row
/// opens a new atom whose mass is the row value. The recovered columns are
/// then decoded into rank lists and the result is re-encoded and compared with
/// `y`. Ambiguous subset sums, undecodable columns and reconstruction
/// mismatches are reported as `ConditionViolated`.
pub fn sparsest_fit(y: &DataVector) -> Result<SparsestFitOutput> {
    if !y.is_point() {
        return Err(Error::Unsupported(
            "sparsest fit needs point data; interval data is not accepted".into(),
        ));
    }
    let scheme = y.scheme();
    let values = y.values();
    let m = values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut atoms: Vec<RecoveredAtom> = Vec::new();
    for &d in &order {
        let v = values[d];
        let masses: Vec<f64> = atoms.iter().map(|a| a.prob).collect();
        match subset_sum(&masses, v, SUBSET_SUM_TOL) {
            Search::Unique(set) => {
                for i in set {
                    atoms[i].column[d] = 1;
                }
            }
            Search::None => {
                let mut column = vec![0u8; m];
                column[d] = 1;
                atoms.push(RecoveredAtom {
                    prob: v,
                    signature_row: d,
                    column,
                    ranks: None,
                });
            }
            Search::Ambiguous => {
                let reason = format!("row {} = {v} is a sum of two different subsets", scheme.rows()[d]);
                return Ok(SparsestFitOutput::violated(atoms, Some(d), reason));
            }
            Search::Exhausted => {
                let reason = format!("subset-sum search budget exhausted at row {}", scheme.rows()[d]);
                return Ok(SparsestFitOutput::violated(atoms, Some(d), reason));
            }
        }
    }

    let total: f64 = atoms.iter().map(|a| a.prob).sum();
    if (total - 1.0).abs() > SUBSET_SUM_TOL * (atoms.len().max(1) as f64) {
        let reason = format!("{} recovered masses sum to {total}", atoms.len());
        return Ok(SparsestFitOutput::violated(atoms, None, reason));
    }
    for k in 0..atoms.len() {
        match decode_column(scheme, &atoms[k].column) {
            Some(sigma) => atoms[k].ranks = Some(sigma),
            None => {
                let row = atoms[k].signature_row;
                let reason = format!("column of the atom with signature row {} does not decode", scheme.rows()[row]);
                return Ok(SparsestFitOutput::violated(atoms, Some(row), reason));
            }
        }
    }
    let distinct: BTreeSet<&RankList> = atoms.iter().filter_map(|a| a.ranks.as_ref()).collect();
    if distinct.len() != atoms.len() {
        return Ok(SparsestFitOutput::violated(atoms, None, "two columns decode to the same rank list".into()));
    }
    let model = SparseChoiceModel::from_weights(
        atoms.iter().map(|a| (a.ranks.clone().expect("decoded above"), a.prob)),
    )?;
    let diff = exact_marginals(&model, scheme)?.max_abs_diff(y);
    if diff > SUBSET_SUM_TOL {
        let reason = format!("re-encoded data differ from the input by {diff:e}");
        return Ok(SparsestFitOutput::violated(atoms, None, reason));
    }
    Ok(SparsestFitOutput {
        status: FitStatus::Recovered,
        atoms,
        model: Some(model),
    })
}

enum Search {
    None,
    Unique(Vec<usize>),
    Ambiguous,
    Exhausted,
}

/// Subsets of `masses` (all positive) summing to `target` within `tol`. The
/// empty set counts, so zero rows match it.
fn subset_sum(masses: &[f64], target: f64, tol: f64) -> Search {
    struct Dfs<'a> {
        masses: &'a [f64],
        suffix: Vec<f64>,
        target: f64,
        tol: f64,
        chosen: Vec<usize>,
        found: Option<Vec<usize>>,
        count: usize,
        nodes: usize,
    }

    impl Dfs<'_> {
        /// Visits the subset `chosen` (whose sum is `sum`) and then every
        /// extension by indices `≥ k`, each subset once.
        fn go(&mut self, k: usize, sum: f64) -> bool {
            self.nodes += 1;
            if self.nodes > SEARCH_BUDGET {
                return false;
            }
            if (sum - self.target).abs() <= self.tol {
                self.count += 1;
                if self.count > 1 {
                    return false;
                }
                self.found = Some(self.chosen.clone());
            }
            for i in k..self.masses.len() {
                if sum + self.suffix[i] < self.target - self.tol {
                    break;
                }
                if sum + self.masses[i] > self.target + self.tol {
                    continue;
                }
                self.chosen.push(i);
                let ok = self.go(i + 1, sum + self.masses[i]);
                self.chosen.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
    }

    let mut suffix = vec![0.0; masses.len() + 1];
    for k in (0..masses.len()).rev() {
        suffix[k] = suffix[k + 1] + masses[k];
    }
    let mut dfs = Dfs {
        masses,
        suffix,
        target,
        tol,
        chosen: Vec::new(),
        found: None,
        count: 0,
        nodes: 0,
    };
    let complete = dfs.go(0, 0.0);
    match (dfs.count, complete) {
        (c, _) if c >= 2 => Search::Ambiguous,
        (_, false) => Search::Exhausted,
        (0, true) => Search::None,
        _ => Search::Unique(dfs.found.expect("one subset found")),
    }
}

/// Reads a rank list off a 0/1 column of `scheme`, or `None` when no rank
/// list has exactly this column.
///
/// Ranking columns are permutation matrices. For the other schemes every row
/// with value 1 pins the winner of its comparison or purchase event, two-way
/// events pin the loser when the value is 0, and the products are sorted
/// topologically. The result is re-encoded and must reproduce the column.
pub fn decode_column(scheme: &ObservationScheme, column: &[u8]) -> Option<RankList> {
    if column.len() != scheme.m() {
        return None;
    }
    let n = scheme.n();
    let sigma = if *scheme.kind() == SchemeKind::Ranking {
        let mut order = vec![usize::MAX; n];
        for (row, &bit) in scheme.rows().iter().zip(column) {
            if let (RowIndex::Rank { r, i }, 1) = (*row, bit) {
                if order[r - 1] != usize::MAX {
                    return None;
                }
                order[r - 1] = i;
            }
        }
        RankList::from_order(&order).ok()?
    } else {
        let mut before = vec![false; n * n];
        let mut beats = |i: usize, k: usize| before[i * n + k] = true;
        for (row, &bit) in scheme.rows().iter().zip(column) {
            match (*row, bit) {
                (RowIndex::Pref { i, j }, 1) => beats(i, j),
                (RowIndex::Pref { i, j }, _) => beats(j, i),
                (RowIndex::Top { i }, 1) => (0..n).filter(|&k| k != i).for_each(|k| beats(i, k)),
                (RowIndex::Top { .. }, _) => {}
                _ => {
                    let (i, set) = scheme.row_event(*row)?;
                    let others = set.members().iter().copied().filter(|&k| k != i);
                    if bit == 1 {
                        others.for_each(|k| beats(i, k));
                    } else if set.len() == 2 {
                        others.for_each(|k| beats(k, i));
                    }
                }
            }
        }
        RankList::from_order(&topological_order(n, &before)?).ok()?
    };
    (scheme.a_column(&sigma).ok()? == column).then_some(sigma)
}

/// Kahn's algorithm, smallest available product first; `None` on a cycle.
fn topological_order(n: usize, before: &[bool]) -> Option<Vec<usize>> {
    let mut indegree: Vec<usize> = (0..n).map(|k| (0..n).filter(|&i| before[i * n + k]).count()).collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n).find(|&k| !done[k] && indegree[k] == 0)?;
        done[next] = true;
        order.push(next);
        for k in 0..n {
            if before[next * n + k] {
                indegree[k] -= 1;
            }
        }
    }
    Some(order)
}
