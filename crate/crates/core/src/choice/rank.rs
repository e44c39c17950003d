use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Assortment, ProductId};
use crate::{Error, Result};

/// Largest `n` for which `n!` rank lists are ever enumerated.
pub const MAX_ENUMERATION_N: usize = 8;

/// The product universe `{0, .., n-1}`; `0` is the no-purchase option.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ProductUniverse {
    n: usize,
}

impl ProductUniverse {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewProducts(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn products(&self) -> core::ops::Range<ProductId> {
        0..self.n
    }

    pub fn check(&self, product: ProductId) -> Result<()> {
        if product < self.n {
            Ok(())
        } else {
            Err(Error::ProductOutOfRange { product, n: self.n })
        }
    }
}

impl TryFrom<usize> for ProductUniverse {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ProductUniverse> for usize {
    fn from(u: ProductUniverse) -> usize {
        u.n
    }
}

/// A strict preference ordering σ over all products.
///
/// `ranks[i]` is the 1-based position of product `i`; rank 1 is the most
/// preferred product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct RankList {
    ranks: Vec<usize>,
}

impl RankList {
    /// Builds a rank list from `ranks[i] = σ(i)`.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        if n < 2 {
            return Err(Error::TooFewProducts(n));
        }
        let mut seen = alloc::vec![false; n];
        for (i, &r) in ranks.iter().enumerate() {
            if r == 0 || r > n {
                return Err(Error::InvalidRankList(format!(
                    "rank {r} of product {i} outside 1..={n}"
                )));
            }
            if core::mem::replace(&mut seen[r - 1], true) {
                return Err(Error::InvalidRankList(format!("rank {r} used twice")));
            }
        }
        Ok(Self { ranks })
    }

    /// Builds a rank list from products listed most-preferred first.
    pub fn from_order(order: &[ProductId]) -> Result<Self> {
        let n = order.len();
        let mut ranks = alloc::vec![0; n];
        for (pos, &p) in order.iter().enumerate() {
            if p >= n {
                return Err(Error::ProductOutOfRange { product: p, n });
            }
            if ranks[p] != 0 {
                return Err(Error::InvalidRankList(format!("product {p} listed twice")));
            }
            ranks[p] = pos + 1;
        }
        Self::from_ranks(ranks)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_ranks((1..=n).collect())
    }

    /// A uniformly random rank list.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Self::from_order(&order)
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    /// σ(i), 1-based.
    #[inline]
    pub fn rank(&self, product: ProductId) -> usize {
        self.ranks[product]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Products from most to least preferred.
    pub fn order(&self) -> Vec<ProductId> {
        let mut order = alloc::vec![0; self.n()];
        for (i, &r) in self.ranks.iter().enumerate() {
            order[r - 1] = i;
        }
        order
    }

    /// Whether product `i` is preferred to product `j`.
    #[inline]
    pub fn prefers(&self, i: ProductId, j: ProductId) -> bool {
        self.ranks[i] < self.ranks[j]
    }

    /// The most preferred product overall.
    pub fn top(&self) -> ProductId {
        self.ranks.iter().position(|&r| r == 1).unwrap_or(0)
    }

    /// The product purchased when `assortment` is offered.
    #[inline]
    pub fn choice(&self, assortment: &Assortment) -> ProductId {
        self.choice_among(assortment.members())
    }

    pub(crate) fn choice_among(&self, members: &[ProductId]) -> ProductId {
        let mut best = members[0];
        for &j in &members[1..] {
            if self.ranks[j] < self.ranks[best] {
                best = j;
            }
        }
        best
    }
}

impl TryFrom<Vec<usize>> for RankList {
    type Error = Error;
    fn try_from(ranks: Vec<usize>) -> Result<Self> {
        Self::from_ranks(ranks)
    }
}

impl From<RankList> for Vec<usize> {
    fn from(r: RankList) -> Vec<usize> {
        r.ranks
    }
}

impl core::fmt::Display for RankList {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let order = self.order();
        for (k, p) in order.iter().enumerate() {
            if k > 0 {
                f.write_str(">")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Every rank list on `n` products, in lexicographic order of the preference
/// order (most preferred product first).
pub fn all_rank_lists(n: usize) -> Result<Vec<RankList>> {
    if n < 2 {
        return Err(Error::TooFewProducts(n));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ENUMERATION_N,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(factorial(n));
    loop {
        out.push(RankList::from_order(&order)?);
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ties_and_out_of_range() {
        assert!(RankList::from_ranks(alloc::vec![1, 1, 2]).is_err());
        assert!(RankList::from_ranks(alloc::vec![0, 1, 2]).is_err());
        assert!(RankList::from_ranks(alloc::vec![1, 2, 4]).is_err());
        assert!(RankList::from_ranks(alloc::vec![1]).is_err());
    }

    #[test]
    fn order_round_trip() {
        let r = RankList::from_ranks(alloc::vec![3, 1, 2]).unwrap();
        assert_eq!(r.order(), alloc::vec![1, 2, 0]);
        assert_eq!(RankList::from_order(&r.order()).unwrap(), r);
        assert_eq!(r.top(), 1);
        assert_eq!(alloc::format!("{r}"), "1>2>0");
    }

    #[test]
    fn enumerates_all_permutations_once() {
        let all = all_rank_lists(4).unwrap();
        assert_eq!(all.len(), 24);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
        assert!(all_rank_lists(9).is_err());
    }
}
