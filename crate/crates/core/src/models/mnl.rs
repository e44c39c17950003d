use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_assortment, ChoiceProbabilities};
use crate::choice::{all_rank_lists, Assortment, ProductId, RankList, SparseChoiceModel};
use crate::{Error, Result};

/// Multinomial logit: `P(j | 𝓜) = w_j / Σ_{i∈𝓜} w_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MnlRepr", into = "MnlRepr")]
pub struct MnlModel {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MnlRepr {
    weights: Vec<f64>,
}

impl TryFrom<MnlRepr> for MnlModel {
    type Error = Error;
    fn try_from(r: MnlRepr) -> Result<Self> {
        Self::new(r.weights)
    }
}

impl From<MnlModel> for MnlRepr {
    fn from(m: MnlModel) -> Self {
        Self { weights: m.weights }
    }
}

impl MnlModel {
    /// Weights for products `0..n`, all finite and positive.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::TooFewProducts(weights.len()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidModel("MNL weights must be finite and positive".into()));
        }
        Ok(Self { weights })
    }

    /// From mean utilities `V_1..V_{n-1}` with `V_0 = 0`.
    pub fn from_utilities(utilities: &[f64]) -> Result<Self> {
        let mut w = alloc::vec![1.0];
        w.extend(utilities.iter().map(|v| libm::exp(*v)));
        Self::new(w)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mean utilities `ln(w_j / w_0)`.
    pub fn utilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| libm::log(w / self.weights[0])).collect()
    }

    pub fn mnl_prob(&self, j: ProductId, assortment: &Assortment) -> Result<f64> {
        self.choice_prob(j, assortment)
    }

    /// Plackett–Luce probability of a full ranking.
    pub fn ranking_prob(&self, sigma: &RankList) -> f64 {
        let order = sigma.order();
        let mut rest: f64 = order.iter().map(|&i| self.weights[i]).sum();
        let mut p = 1.0;
        for &i in &order[..order.len() - 1] {
            p *= self.weights[i] / rest;
            rest -= self.weights[i];
        }
        p
    }

    /// The distribution over all of S_N whose choice probabilities are this
    /// model's (N ≤ 8).
    pub fn to_rank_distribution(&self) -> Result<SparseChoiceModel> {
        let all = all_rank_lists(self.n())?;
        SparseChoiceModel::from_weights(all.into_iter().map(|r| {
            let p = self.ranking_prob(&r);
            (r, p)
        }))
    }

    /// Samples a ranking by sequential Luce draws.
    pub fn sample_ranking<R: Rng + ?Sized>(&self, rng: &mut R) -> RankList {
        sample_luce(&self.weights, rng)
    }
}

pub(crate) fn sample_luce<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> RankList {
    let mut left: Vec<usize> = (0..weights.len()).collect();
    let mut order = Vec::with_capacity(weights.len());
    while left.len() > 1 {
        let total: f64 = left.iter().map(|&i| weights[i]).sum();
        let mut u = rng.random::<f64>() * total;
        let mut k = left.len() - 1;
        for (pos, &i) in left.iter().enumerate() {
            u -= weights[i];
            if u < 0.0 {
                k = pos;
                break;
            }
        }
        order.push(left.remove(k));
    }
    order.push(left[0]);
    RankList::from_order(&order).expect("a permutation")
}

impl ChoiceProbabilities for MnlModel {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>> {
        check_assortment(self.n(), assortment)?;
        let total: f64 = assortment.members().iter().map(|&i| self.weights[i]).sum();
        Ok(assortment
            .members()
            .iter()
            .map(|&i| self.weights[i] / total)
            .collect())
    }
}
