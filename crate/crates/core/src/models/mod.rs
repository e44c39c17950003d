//! Parametric ground-truth models, the random sparse-model generator, the
//! AMZN presets, data simulation and a maximum-likelihood MNL fit.

mod fit;
mod generative;
mod hermite;
mod mixed;
mod mnl;
mod nested;
pub mod presets;
mod simulate;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use fit::{fit_mnl, MnlFit, FIT_CLAMP};
pub use generative::{generate_random_model, GenerativeSpec};
pub use hermite::gauss_hermite;
pub use mixed::{Integration, MmnlModel, MmnlSpec};
pub use mnl::MnlModel;
pub use nested::NestedLogitModel;
pub use simulate::{event_marginals, simulate_pairwise_marginals, simulate_transactions, TransactionCounts};

use crate::choice::{compensated_sum, Assortment, PriceVector, ProductId, SparseChoiceModel};
use crate::{Error, Result};

/// Anything that assigns purchase probabilities to the members of an
/// assortment.
pub trait ChoiceProbabilities {
    fn n(&self) -> usize;

    /// Probabilities aligned with `assortment.members()`.
    fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>>;

    fn choice_prob(&self, j: ProductId, assortment: &Assortment) -> Result<f64> {
        let k = assortment
            .members()
            .binary_search(&j)
            .map_err(|_| Error::NotInAssortment { product: j })?;
        Ok(self.choice_probs(assortment)?[k])
    }

    fn revenue(&self, assortment: &Assortment, prices: &PriceVector) -> Result<f64> {
        if prices.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: prices.n(),
            });
        }
        let probs = self.choice_probs(assortment)?;
        Ok(compensated_sum(
            assortment
                .members()
                .iter()
                .zip(&probs)
                .map(|(&j, &p)| prices.get(j) * p),
        ))
    }
}

impl ChoiceProbabilities for SparseChoiceModel {
    fn n(&self) -> usize {
        SparseChoiceModel::n(self)
    }

    fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>> {
        SparseChoiceModel::choice_probs(self, assortment)
    }
}

pub(crate) fn check_assortment(n: usize, assortment: &Assortment) -> Result<()> {
    assortment.check(n)
}

/// Any supported ground-truth model, as stored in model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GroundTruth {
    Mnl(MnlModel),
    Nested(NestedLogitModel),
    Mixed(MmnlModel),
    Sparse { model: SparseChoiceModel },
}

impl GroundTruth {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Mnl(_) => "mnl",
            Self::Nested(_) => "nested",
            Self::Mixed(_) => "mixed",
            Self::Sparse { .. } => "sparse",
        }
    }
}

impl ChoiceProbabilities for GroundTruth {
    fn n(&self) -> usize {
        match self {
            Self::Mnl(m) => m.n(),
            Self::Nested(m) => m.n(),
            Self::Mixed(m) => m.n(),
            Self::Sparse { model } => model.n(),
        }
    }

    fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>> {
        match self {
            Self::Mnl(m) => m.choice_probs(assortment),
            Self::Nested(m) => m.choice_probs(assortment),
            Self::Mixed(m) => m.choice_probs(assortment),
            Self::Sparse { model } => ChoiceProbabilities::choice_probs(model, assortment),
        }
    }
}
