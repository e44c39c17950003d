use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ProductId;
use crate::{Error, Result};

/// A set of offered products. Always contains the no-purchase option `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<ProductId>", into = "Vec<ProductId>")]
pub struct Assortment {
    members: Vec<ProductId>,
}

impl Assortment {
    /// Collects `products`, adding `0`, sorting and removing duplicates.
    pub fn new<I: IntoIterator<Item = ProductId>>(products: I) -> Self {
        let mut members: Vec<ProductId> = core::iter::once(0).chain(products).collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    /// Like [`Assortment::new`] but rejects ids outside `0..n`.
    pub fn checked<I: IntoIterator<Item = ProductId>>(n: usize, products: I) -> Result<Self> {
        let a = Self::new(products);
        a.check(n)?;
        Ok(a)
    }

    /// Every product of the universe.
    pub fn full(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    /// Only the no-purchase option.
    pub fn empty() -> Self {
        Self { members: alloc::vec![0] }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&p) if p >= n => Err(Error::ProductOutOfRange { product: p, n }),
            _ => Ok(()),
        }
    }

    /// Sorted members including `0`.
    pub fn members(&self) -> &[ProductId] {
        &self.members
    }

    /// Sorted members excluding `0`.
    pub fn products(&self) -> &[ProductId] {
        &self.members[1..]
    }

    pub fn contains(&self, product: ProductId) -> bool {
        self.members.binary_search(&product).is_ok()
    }

    /// Number of members including `0`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Number of real products offered.
    pub fn size(&self) -> usize {
        self.members.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// Parses a comma separated id list such as `"0,3,7"` (0 may be omitted).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let mut ids = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let id: usize = tok
                .parse()
                .map_err(|_| Error::InvalidData(alloc::format!("bad product id '{tok}'")))?;
            ids.push(id);
        }
        Self::checked(n, ids)
    }
}

impl From<Vec<ProductId>> for Assortment {
    fn from(v: Vec<ProductId>) -> Self {
        Self::new(v)
    }
}

impl From<Assortment> for Vec<ProductId> {
    fn from(a: Assortment) -> Vec<ProductId> {
        a.members
    }
}

impl core::fmt::Display for Assortment {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}
