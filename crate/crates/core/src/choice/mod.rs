//! Domain types for nonparametric choice: products, rank lists, assortments,
//! distributions over rank lists, observation schemes and data vectors.
//!
//! Conventions used throughout the crate:
//!
//! * Products are `0..n`; product `0` is the no-purchase option.
//! * A [`RankList`] stores `ranks[i] = σ(i) ∈ 1..=n`, rank 1 being the most
//!   preferred product. A customer offered an assortment buys the member with
//!   the smallest rank.
//! * Every [`Assortment`] contains product `0`.

mod assortment;
mod data;
mod model;
mod prices;
mod rank;
mod scheme;

pub use assortment::Assortment;
pub use data::{exact_marginals, DataVector};
pub use model::{Atom, SparseChoiceModel};
pub use prices::PriceVector;
pub use rank::{all_rank_lists, factorial, ProductUniverse, RankList, MAX_ENUMERATION_N};
pub use scheme::{ObservationScheme, RowIndex, SchemeKind};

/// Index of a product; `0` is the no-purchase option.
pub type ProductId = usize;

/// Objective direction for robust estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// Sum with Kahan compensation.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}
