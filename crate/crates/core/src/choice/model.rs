use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{compensated_sum, Assortment, PriceVector, ProductId, RankList};
use crate::{Error, Result, NORMALIZATION_TOL};

/// One customer type and its probability mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub ranks: RankList,
    pub prob: f64,
}

/// A finitely supported distribution λ over rank lists.
///
/// Serialized as a JSON array of `{"ranks": [..], "prob": p}` objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct SparseChoiceModel {
    n: usize,
    atoms: Vec<Atom>,
}

impl SparseChoiceModel {
    /// Validates an explicit support. Probabilities must be positive, the
    /// rank lists distinct, and the total mass 1 within 1e-12.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidDistribution("empty support".into()));
        };
        let n = first.ranks.n();
        for a in &atoms {
            if a.ranks.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.ranks.n(),
                });
            }
            if !(a.prob > 0.0 && a.prob <= 1.0) {
                return Err(Error::InvalidDistribution(alloc::format!(
                    "probability {} outside (0,1]",
                    a.prob
                )));
            }
        }
        let mut seen: Vec<&RankList> = atoms.iter().map(|a| &a.ranks).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDistribution("duplicate rank list".into()));
        }
        let total = compensated_sum(atoms.iter().map(|a| a.prob));
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(alloc::format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { n, atoms })
    }

    /// Builds a model from nonnegative weights: duplicates are merged, zero
    /// weights dropped, and the rest normalized. Atoms are ordered by rank list.
    pub fn from_weights<I: IntoIterator<Item = (RankList, f64)>>(weights: I) -> Result<Self> {
        let mut merged: BTreeMap<RankList, f64> = BTreeMap::new();
        for (r, w) in weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidDistribution(alloc::format!("weight {w}")));
            }
            if w > 0.0 {
                *merged.entry(r).or_insert(0.0) += w;
            }
        }
        let total = compensated_sum(merged.values().copied());
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("no positive weight".into()));
        }
        let mut atoms: Vec<Atom> = merged
            .into_iter()
            .map(|(ranks, w)| Atom {
                ranks,
                prob: w / total,
            })
            .collect();
        let drift = 1.0 - compensated_sum(atoms.iter().map(|a| a.prob));
        if drift != 0.0 {
            let big = (0..atoms.len())
                .max_by(|&a, &b| atoms[a].prob.total_cmp(&atoms[b].prob))
                .unwrap_or(0);
            atoms[big].prob += drift;
        }
        Self::new(atoms)
    }

    /// The single-type model.
    pub fn deterministic(ranks: RankList) -> Self {
        Self {
            n: ranks.n(),
            atoms: alloc::vec![Atom { ranks, prob: 1.0 }],
        }
    }

    /// Uniform distribution over all of S_N (N ≤ 8).
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(super::all_rank_lists(n)?.into_iter().map(|r| (r, 1.0)))
    }

    /// `w·self + (1-w)·other`.
    pub fn mixture(&self, other: &Self, w: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let a = self.atoms.iter().map(|a| (a.ranks.clone(), w * a.prob));
        let b = other.atoms.iter().map(|a| (a.ranks.clone(), (1.0 - w) * a.prob));
        Self::from_weights(a.chain(b))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Support size K.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn probability_of(&self, ranks: &RankList) -> f64 {
        self.atoms
            .iter()
            .find(|a| &a.ranks == ranks)
            .map_or(0.0, |a| a.prob)
    }

    /// Atoms sorted by rank list, for order-insensitive comparison.
    pub fn sorted_atoms(&self) -> Vec<Atom> {
        let mut v = self.atoms.clone();
        v.sort_by(|a, b| a.ranks.cmp(&b.ranks));
        v
    }

    /// λʲ(𝓜): mass of the types that buy `j` from `assortment`.
    pub fn choice_prob(&self, j: ProductId, assortment: &Assortment) -> Result<f64> {
        assortment.check(self.n)?;
        if !assortment.contains(j) {
            return Err(Error::NotInAssortment { product: j });
        }
        Ok(compensated_sum(
            self.atoms
                .iter()
                .filter(|a| a.ranks.choice(assortment) == j)
                .map(|a| a.prob),
        ))
    }

    /// Choice probabilities of every member, aligned with `assortment.members()`.
    pub fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>> {
        assortment.check(self.n)?;
        let members = assortment.members();
        let mut out = alloc::vec![0.0; members.len()];
        for a in &self.atoms {
            let j = a.ranks.choice(assortment);
            let k = members.binary_search(&j).expect("choice is a member");
            out[k] += a.prob;
        }
        Ok(out)
    }

    /// Expected revenue R(𝓜) = Σ p_j λʲ(𝓜).
    pub fn revenue(&self, assortment: &Assortment, prices: &PriceVector) -> Result<f64> {
        prices.check(self.n)?;
        assortment.check(self.n)?;
        Ok(compensated_sum(
            self.atoms
                .iter()
                .map(|a| a.prob * prices.get(a.ranks.choice(assortment))),
        ))
    }

    /// Draws one rank list using a uniform variate `u ∈ [0,1)`.
    pub fn pick(&self, u: f64) -> &RankList {
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.prob;
            if u < acc {
                return &a.ranks;
            }
        }
        &self.atoms[self.atoms.len() - 1].ranks
    }
}

impl TryFrom<Vec<Atom>> for SparseChoiceModel {
    type Error = Error;
    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<SparseChoiceModel> for Vec<Atom> {
    fn from(m: SparseChoiceModel) -> Vec<Atom> {
        m.atoms
    }
}
