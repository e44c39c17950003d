use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Assortment, ProductId, ProductUniverse, RankList};
use crate::{Error, Result};

/// What kind of marginal information is observed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Fraction of customers preferring `i` to `j`, for all ordered pairs.
    Comparison,
    /// Fraction of customers ranking product `i` at position `r`.
    Ranking,
    /// Comparison rows followed by first-choice fractions.
    TopSet,
    /// Sales fractions of every member of every listed assortment.
    Transaction(Vec<Assortment>),
    /// Purchase shares under pairwise offer sets `{i, j, 0}`.
    CensoredComparison,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Comparison => "comparison",
            Self::Ranking => "ranking",
            Self::TopSet => "top-set",
            Self::Transaction(_) => "transaction",
            Self::CensoredComparison => "censored-comparison",
        }
    }

    /// Parses a kind name. Transaction schemes need their assortments.
    pub fn from_name(name: &str, assortments: Option<Vec<Assortment>>) -> Result<Self> {
        Ok(match name {
            "comparison" => Self::Comparison,
            "ranking" => Self::Ranking,
            "top-set" | "topset" => Self::TopSet,
            "censored-comparison" | "censored" => Self::CensoredComparison,
            "transaction" => Self::Transaction(assortments.ok_or_else(|| {
                Error::InvalidData("transaction scheme needs an assortment list".into())
            })?),
            other => return Err(Error::Unsupported(alloc::format!("unknown scheme '{other}'"))),
        })
    }
}

/// Identifies one observed marginal (one row of A).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowIndex {
    /// `σ(i) < σ(j)`.
    Pref { i: ProductId, j: ProductId },
    /// `σ(i) = r`, `r` 1-based.
    Rank { r: usize, i: ProductId },
    /// `σ(i) = 1`.
    Top { i: ProductId },
    /// `i` is bought from the `m`-th listed assortment.
    Sale { i: ProductId, m: usize },
    /// For `i ≠ 0`: `i` is bought from `{i, j, 0}`. For `i = 0`: `0` is
    /// chosen from `{0, j}`.
    Censored { i: ProductId, j: ProductId },
}

impl core::fmt::Display for RowIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            Self::Pref { i, j } => write!(f, "pref({i},{j})"),
            Self::Rank { r, i } => write!(f, "rank({r},{i})"),
            Self::Top { i } => write!(f, "top({i})"),
            Self::Sale { i, m } => write!(f, "sale({i},M{m})"),
            Self::Censored { i, j } => write!(f, "cens({i},{j})"),
        }
    }
}

/// An observation scheme on `n` products: defines the rows of A and their
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationScheme {
    n: usize,
    kind: SchemeKind,
    rows: Vec<RowIndex>,
}

impl ObservationScheme {
    pub fn new(n: usize, kind: SchemeKind) -> Result<Self> {
        ProductUniverse::new(n)?;
        let pairs = || (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
        let rows: Vec<RowIndex> = match &kind {
            SchemeKind::Comparison => pairs().map(|(i, j)| RowIndex::Pref { i, j }).collect(),
            SchemeKind::Ranking => (1..=n)
                .flat_map(|r| (0..n).map(move |i| RowIndex::Rank { r, i }))
                .collect(),
            SchemeKind::TopSet => pairs()
                .map(|(i, j)| RowIndex::Pref { i, j })
                .chain((0..n).map(|i| RowIndex::Top { i }))
                .collect(),
            SchemeKind::Transaction(list) => {
                for a in list {
                    a.check(n)?;
                }
                (0..n)
                    .flat_map(|i| {
                        list.iter()
                            .enumerate()
                            .filter(move |(_, a)| a.contains(i))
                            .map(move |(m, _)| RowIndex::Sale { i, m })
                    })
                    .collect()
            }
            SchemeKind::CensoredComparison => {
                pairs().map(|(i, j)| RowIndex::Censored { i, j }).collect()
            }
        };
        Ok(Self { n, kind, rows })
    }

    pub fn comparison(n: usize) -> Result<Self> {
        Self::new(n, SchemeKind::Comparison)
    }

    pub fn ranking(n: usize) -> Result<Self> {
        Self::new(n, SchemeKind::Ranking)
    }

    pub fn top_set(n: usize) -> Result<Self> {
        Self::new(n, SchemeKind::TopSet)
    }

    pub fn transaction(n: usize, assortments: Vec<Assortment>) -> Result<Self> {
        Self::new(n, SchemeKind::Transaction(assortments))
    }

    pub fn censored_comparison(n: usize) -> Result<Self> {
        Self::new(n, SchemeKind::CensoredComparison)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    /// Row dimension m.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[RowIndex] {
        &self.rows
    }

    pub fn labels(&self) -> Vec<String> {
        self.rows.iter().map(|r| alloc::format!("{r}")).collect()
    }

    pub fn row_of(&self, row: RowIndex) -> Option<usize> {
        self.rows.binary_search(&row).ok()
    }

    /// Listed assortments of a transaction scheme.
    pub fn assortments(&self) -> &[Assortment] {
        match &self.kind {
            SchemeKind::Transaction(list) => list,
            _ => &[],
        }
    }

    /// `A(σ)_row`.
    #[inline]
    pub fn entry(&self, sigma: &RankList, row: RowIndex) -> bool {
        match row {
            RowIndex::Pref { i, j } => sigma.prefers(i, j),
            RowIndex::Rank { r, i } => sigma.rank(i) == r,
            RowIndex::Top { i } => sigma.rank(i) == 1,
            RowIndex::Sale { i, m } => sigma.choice(&self.assortments()[m]) == i,
            RowIndex::Censored { i, j } => {
                if i == 0 {
                    sigma.prefers(0, j)
                } else {
                    sigma.prefers(i, j) && sigma.prefers(i, 0)
                }
            }
        }
    }

    /// The column A(σ) under this scheme's row order.
    pub fn a_column(&self, sigma: &RankList) -> Result<Vec<u8>> {
        self.check_rank_list(sigma)?;
        Ok(self.rows.iter().map(|&r| self.entry(sigma, r) as u8).collect())
    }

    pub(crate) fn check_rank_list(&self, sigma: &RankList) -> Result<()> {
        if sigma.n() == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                got: sigma.n(),
            })
        }
    }

    /// For rows that are purchase events, the purchased product and the offer
    /// set; `None` for preference and rank rows.
    pub fn row_event(&self, row: RowIndex) -> Option<(ProductId, Assortment)> {
        match row {
            RowIndex::Sale { i, m } => Some((i, self.assortments()[m].clone())),
            RowIndex::Censored { i: 0, j } => Some((0, Assortment::new([j]))),
            RowIndex::Censored { i, j } => Some((i, Assortment::new([i, j]))),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeRepr {
    kind: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assortments: Option<Vec<Assortment>>,
}

impl Serialize for ObservationScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        SchemeRepr {
            kind: self.kind.name().into(),
            n: self.n,
            assortments: match &self.kind {
                SchemeKind::Transaction(list) => Some(list.clone()),
                _ => None,
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ObservationScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let repr = SchemeRepr::deserialize(d)?;
        let kind = SchemeKind::from_name(&repr.kind, repr.assortments).map_err(serde::de::Error::custom)?;
        Self::new(repr.n, kind).map_err(serde::de::Error::custom)
    }
}
