use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_assortment, ChoiceProbabilities};
use crate::choice::{Assortment, ProductId};
use crate::{Error, Result};

/// Nested logit with fractional no-purchase membership (cross-nested when
/// some `α_ℓ < 1`).
///
/// `P(j | 𝓜) = W_ℓ^ρ / Σ_m W_m^ρ · w_j / W_ℓ` for `j` in nest `ℓ`, with
/// `W_ℓ = α_ℓ w_0 + Σ_{i ∈ 𝒩_ℓ ∩ 𝓜, i≠0} w_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NestedRepr", into = "NestedRepr")]
pub struct NestedLogitModel {
    weights: Vec<f64>,
    nests: Vec<Vec<ProductId>>,
    rho: f64,
    alpha: Vec<f64>,
    nest_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct NestedRepr {
    weights: Vec<f64>,
    nests: Vec<Vec<ProductId>>,
    rho: f64,
    alpha: Vec<f64>,
}

impl TryFrom<NestedRepr> for NestedLogitModel {
    type Error = Error;
    fn try_from(r: NestedRepr) -> Result<Self> {
        Self::new(r.weights, r.nests, r.rho, r.alpha)
    }
}

impl From<NestedLogitModel> for NestedRepr {
    fn from(m: NestedLogitModel) -> Self {
        Self {
            weights: m.weights,
            nests: m.nests,
            rho: m.rho,
            alpha: m.alpha,
        }
    }
}

impl NestedLogitModel {
    /// `nests` must partition `1..n` (a nest may be empty, e.g. one reserved
    /// for the no-purchase option); `0 < ρ < 1`; `α_ℓ ≥ 0` with
    /// `Σ α_ℓ^ρ = 1` within 1e-9.
    pub fn new(weights: Vec<f64>, nests: Vec<Vec<ProductId>>, rho: f64, alpha: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if n < 2 {
            return Err(Error::TooFewProducts(n));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidModel("weights must be finite and positive".into()));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidModel(alloc::format!("rho = {rho} outside (0,1)")));
        }
        if alpha.len() != nests.len() || nests.is_empty() {
            return Err(Error::InvalidModel("need one alpha per nest".into()));
        }
        if alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidModel("alpha must be nonnegative".into()));
        }
        let total: f64 = alpha.iter().map(|a| libm::pow(*a, rho)).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidModel(alloc::format!(
                "sum of alpha^rho is {total}, expected 1"
            )));
        }
        let mut nest_of = alloc::vec![usize::MAX; n];
        for (l, nest) in nests.iter().enumerate() {
            for &i in nest {
                if i == 0 || i >= n {
                    return Err(Error::InvalidModel(alloc::format!("nest member {i} not in 1..{n}")));
                }
                if nest_of[i] != usize::MAX {
                    return Err(Error::InvalidModel(alloc::format!("product {i} in two nests")));
                }
                nest_of[i] = l;
            }
        }
        if let Some(i) = (1..n).find(|&i| nest_of[i] == usize::MAX) {
            return Err(Error::InvalidModel(alloc::format!("product {i} in no nest")));
        }
        Ok(Self {
            weights,
            nests,
            rho,
            alpha,
            nest_of,
        })
    }

    /// Equal no-purchase membership in every nest: `α_ℓ = (1/L)^{1/ρ}`.
    pub fn cross_nested(weights: Vec<f64>, nests: Vec<Vec<ProductId>>, rho: f64) -> Result<Self> {
        let l = nests.len() as f64;
        let a = libm::pow(1.0 / l, 1.0 / rho);
        let alpha = alloc::vec![a; nests.len()];
        Self::new(weights, nests, rho, alpha)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nests(&self) -> &[Vec<ProductId>] {
        &self.nests
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn nl_prob(&self, j: ProductId, assortment: &Assortment) -> Result<f64> {
        self.choice_prob(j, assortment)
    }
}

impl ChoiceProbabilities for NestedLogitModel {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>> {
        check_assortment(self.n(), assortment)?;
        let w0 = self.weights[0];
        let mut nest_w: Vec<f64> = self.alpha.iter().map(|a| a * w0).collect();
        for &i in assortment.products() {
            nest_w[self.nest_of[i]] += self.weights[i];
        }
        let denom: f64 = nest_w
            .iter()
            .filter(|w| **w > 0.0)
            .map(|w| libm::pow(*w, self.rho))
            .sum();
        let mut probs = alloc::vec![0.0; assortment.len()];
        let mut bought = 0.0;
        for (k, &i) in assortment.members().iter().enumerate().skip(1) {
            let wl = nest_w[self.nest_of[i]];
            let p = libm::pow(wl, self.rho) / denom * self.weights[i] / wl;
            probs[k] = p;
            bought += p;
        }
        probs[0] = (1.0 - bought).max(0.0);
        Ok(probs)
    }
}
