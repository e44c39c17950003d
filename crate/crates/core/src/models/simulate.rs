use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::ChoiceProbabilities;
use crate::choice::{Assortment, DataVector, ObservationScheme, ProductId};
use crate::{Error, Result};

/// Purchase counts `C_{i,𝓜}` per offered assortment, including no-purchase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransactionCounts {
    pub n: usize,
    pub assortments: Vec<Assortment>,
    /// `counts[m][k]` is the count of `assortments[m].members()[k]`.
    pub counts: Vec<Vec<u64>>,
}

impl TransactionCounts {
    pub fn new(n: usize, assortments: Vec<Assortment>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if assortments.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: assortments.len(),
                got: counts.len(),
            });
        }
        for (a, c) in assortments.iter().zip(&counts) {
            a.check(n)?;
            if a.len() != c.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self {
            n,
            assortments,
            counts,
        })
    }

    /// Builds counts from `(assortment index, product, count)` records;
    /// missing members count zero and repeated records add up.
    pub fn from_records(n: usize, assortments: Vec<Assortment>, records: &[(usize, ProductId, u64)]) -> Result<Self> {
        let mut counts: Vec<Vec<u64>> = assortments.iter().map(|a| alloc::vec![0; a.len()]).collect();
        for &(m, i, c) in records {
            let a = assortments.get(m).ok_or_else(|| {
                Error::InvalidData(alloc::format!("assortment index {m} out of range"))
            })?;
            let k = a
                .members()
                .binary_search(&i)
                .map_err(|_| Error::NotInAssortment { product: i })?;
            counts[m][k] += c;
        }
        Self::new(n, assortments, counts)
    }

    pub fn len(&self) -> usize {
        self.assortments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assortments.is_empty()
    }

    /// Arrivals observed under assortment `m`.
    pub fn total(&self, m: usize) -> u64 {
        self.counts[m].iter().sum()
    }

    pub fn count(&self, m: usize, product: ProductId) -> u64 {
        self.assortments[m]
            .members()
            .binary_search(&product)
            .map_or(0, |k| self.counts[m][k])
    }

    /// Restriction to the listed assortment indices.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            n: self.n,
            assortments: indices.iter().map(|&m| self.assortments[m].clone()).collect(),
            counts: indices.iter().map(|&m| self.counts[m].clone()).collect(),
        }
    }

    /// `(assortment, product, count)` records in assortment then product order.
    pub fn records(&self) -> Vec<(usize, ProductId, u64)> {
        let mut out = Vec::new();
        for (m, a) in self.assortments.iter().enumerate() {
            for (k, &i) in a.members().iter().enumerate() {
                out.push((m, i, self.counts[m][k]));
            }
        }
        out
    }
}

/// Draws `arrivals` customers per assortment from the model's choice
/// probabilities (a multinomial draw by sequential binomials).
pub fn simulate_transactions<M, R>(
    model: &M,
    assortments: &[Assortment],
    arrivals: u64,
    rng: &mut R,
) -> Result<TransactionCounts>
where
    M: ChoiceProbabilities + ?Sized,
    R: Rng + ?Sized,
{
    let mut counts = Vec::with_capacity(assortments.len());
    for a in assortments {
        let probs = model.choice_probs(a)?;
        let mut left = arrivals;
        let mut mass = 1.0;
        let mut row = alloc::vec![0; a.len()];
        for (k, &p) in probs.iter().enumerate() {
            if left == 0 {
                break;
            }
            if k + 1 == probs.len() {
                row[k] = left;
                break;
            }
            let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
            let c = Binomial::new(left, q)
                .map_err(|e| Error::Numerical(alloc::format!("binomial: {e}")))?
                .sample(rng);
            row[k] = c;
            left -= c;
            mass -= p;
        }
        counts.push(row);
    }
    TransactionCounts::new(model.n(), assortments.to_vec(), counts)
}

/// Exact marginals for schemes whose rows are purchase events (transaction
/// and censored-comparison schemes).
pub fn event_marginals<M: ChoiceProbabilities + ?Sized>(model: &M, scheme: &ObservationScheme) -> Result<DataVector> {
    if model.n() != scheme.n() {
        return Err(Error::DimensionMismatch {
            expected: scheme.n(),
            got: model.n(),
        });
    }
    let mut y = Vec::with_capacity(scheme.m());
    for &row in scheme.rows() {
        let (i, a) = scheme.row_event(row).ok_or_else(|| {
            Error::Unsupported(alloc::format!(
                "{} rows are not purchase events",
                scheme.kind().name()
            ))
        })?;
        y.push(model.choice_prob(i, &a)?.clamp(0.0, 1.0));
    }
    DataVector::new(scheme.clone(), y)
}

/// `y_{ij} = P(i | {i,j,0})` and `y_{0j} = P(0 | {0,j})`, exactly.
pub fn simulate_pairwise_marginals<M: ChoiceProbabilities + ?Sized>(model: &M) -> Result<DataVector> {
    event_marginals(model, &ObservationScheme::censored_comparison(model.n())?)
}
