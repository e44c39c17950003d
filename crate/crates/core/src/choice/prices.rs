use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-product prices; `prices[0] = 0` for the no-purchase option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriceVector {
    prices: Vec<f64>,
}

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::TooFewProducts(prices.len()));
        }
        if prices[0] != 0.0 {
            return Err(Error::InvalidPrices("price of product 0 must be 0".into()));
        }
        if let Some(p) = prices.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPrices(alloc::format!(
                "price {p} is not a finite nonnegative number"
            )));
        }
        Ok(Self { prices })
    }

    /// Builds a price vector from the prices of products `1..n`.
    pub fn from_products(rest: &[f64]) -> Result<Self> {
        let mut prices = alloc::vec![0.0];
        prices.extend_from_slice(rest);
        Self::new(prices)
    }

    /// `p = (0, 1, .., 1)`: revenue becomes the conversion rate.
    pub fn unit(n: usize) -> Self {
        let mut prices = alloc::vec![1.0; n];
        prices[0] = 0.0;
        Self { prices }
    }

    pub fn n(&self) -> usize {
        self.prices.len()
    }

    #[inline]
    pub fn get(&self, product: usize) -> f64 {
        self.prices[product]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.prices
    }

    pub fn max(&self) -> f64 {
        self.prices.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.n() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                got: self.n(),
            })
        }
    }
}

impl TryFrom<Vec<f64>> for PriceVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PriceVector> for Vec<f64> {
    fn from(p: PriceVector) -> Vec<f64> {
        p.prices
    }
}
