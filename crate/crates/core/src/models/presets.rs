//! The AMZN DVD model (15 products plus no-purchase), its cross-nested and
//! mixed perturbations, and the random stress-test families built on them.
//!
//! Desk-scale instances with `n < 16` use the first `n - 1` products; nests
//! are restricted to those products and `α_ℓ = (1/L)^{1/ρ}` is recomputed over
//! the remaining `L` nests.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GroundTruth, Integration, MmnlModel, MmnlSpec, MnlModel, NestedLogitModel};
use crate::choice::PriceVector;
use crate::{Error, Result};

const TABLE: &str = include_str!("../../data/amzn_table1.csv");

/// `(θ₀, θ₁, θ₂)`: intercept, price-per-disc and helpful-votes coefficients.
pub const AMZN_THETA: [f64; 3] = [-4.31, -0.038, 3.54e-5];
/// Number of products including no-purchase.
pub const AMZN_N: usize = 16;
pub const AMZN_RHO: f64 = 0.5;
/// Inclusive product ranges of the four nests.
pub const AMZN_NESTS: [(usize, usize); 4] = [(1, 5), (6, 9), (10, 13), (14, 15)];
pub const AMZN_MMNL_S: f64 = 0.25;

/// One row of the AMZN attribute table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmznProduct {
    pub id: usize,
    pub mean_utility: f64,
    pub price: f64,
    pub price_per_disc: f64,
    pub votes: f64,
}

impl AmznProduct {
    /// Mean utility recomputed from the attributes and [`AMZN_THETA`].
    pub fn fitted_utility(&self) -> f64 {
        let [t0, t1, t2] = AMZN_THETA;
        t0 + t1 * self.price_per_disc + t2 * self.votes
    }

    pub fn features(&self) -> Vec<f64> {
        alloc::vec![1.0, self.price_per_disc, self.votes]
    }
}

/// The table's 15 products in id order.
pub fn amzn_table() -> Vec<AmznProduct> {
    TABLE
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let num = |k: usize| f[k].trim().parse::<f64>().expect("valid table");
            AmznProduct {
                id: f[0].trim().parse().expect("valid table"),
                mean_utility: num(1),
                price: num(2),
                price_per_disc: num(3),
                votes: num(4),
            }
        })
        .collect()
}

fn products(n: usize) -> Result<Vec<AmznProduct>> {
    if n < 2 {
        return Err(Error::TooFewProducts(n));
    }
    if n > AMZN_N {
        return Err(Error::TooLarge { n, limit: AMZN_N });
    }
    Ok(amzn_table().into_iter().take(n - 1).collect())
}

/// Prices of the first `n - 1` products.
pub fn amzn_prices(n: usize) -> Result<PriceVector> {
    let p: Vec<f64> = products(n)?.iter().map(|p| p.price).collect();
    PriceVector::from_products(&p)
}

/// AMZN nests restricted to products `1..n`, empty nests dropped.
pub fn amzn_nests(n: usize) -> Vec<Vec<usize>> {
    AMZN_NESTS
        .iter()
        .map(|&(lo, hi)| (lo..=hi).filter(|&i| i < n).collect::<Vec<_>>())
        .filter(|v| !v.is_empty())
        .collect()
}

/// The MNL with the table's mean utilities.
pub fn amzn_mnl(n: usize) -> Result<MnlModel> {
    let v: Vec<f64> = products(n)?.iter().map(|p| p.mean_utility).collect();
    MnlModel::from_utilities(&v)
}

pub fn amzn_cnl(n: usize) -> Result<NestedLogitModel> {
    NestedLogitModel::cross_nested(amzn_mnl(n)?.weights().to_vec(), amzn_nests(n), AMZN_RHO)
}

pub fn amzn_features(n: usize) -> Result<Vec<Vec<f64>>> {
    let mut x = alloc::vec![alloc::vec![0.0; 3]];
    x.extend(products(n)?.iter().map(AmznProduct::features));
    Ok(x)
}

/// Mixed logit with `β_i = (1 + η_i) θ_i`, `η_i ~ Normal(μ_i, s²)`.
pub fn amzn_mmnl_with(n: usize, mu: [f64; 3], s: f64, seed: u64) -> Result<MmnlModel> {
    MmnlModel::new(MmnlSpec {
        features: amzn_features(n)?,
        theta: AMZN_THETA.to_vec(),
        mu: mu.to_vec(),
        s,
        integration: Integration::Auto { seed },
    })
}

pub fn amzn_mmnl(n: usize, seed: u64) -> Result<MmnlModel> {
    amzn_mmnl_with(n, [0.0; 3], AMZN_MMNL_S, seed)
}

/// MNL with `ln w_j ~ U[-5, 5]` for `j ≥ 1`.
pub fn mnl_rand<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MnlModel> {
    let v: Vec<f64> = (1..n).map(|_| rng.random_range(-5.0..=5.0)).collect();
    MnlModel::from_utilities(&v)
}

/// AMZN-CNL nests and ρ with `ln w_j ~ U[-5, 5]`.
pub fn cnl_rand<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<NestedLogitModel> {
    let w = mnl_rand(n, rng)?.weights().to_vec();
    if n > AMZN_N {
        return Err(Error::TooLarge { n, limit: AMZN_N });
    }
    NestedLogitModel::cross_nested(w, amzn_nests(n), AMZN_RHO)
}

/// AMZN-MMNL with `μ_i ~ U[-1, 1]` and standard deviation `s`. The draws
/// consumed from `rng` do not depend on `s`, so equal seeds give the same
/// means and the same integration draws across `s`.
pub fn mmnl_rand<R: Rng + ?Sized>(n: usize, s: f64, rng: &mut R) -> Result<MmnlModel> {
    let mu = [
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
    ];
    let seed = rng.random::<u64>();
    amzn_mmnl_with(n, mu, s, seed)
}

/// Named ground-truth generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    MnlRand,
    CnlRand,
    MmnlRand,
    Amzn,
    AmznCnl,
    AmznMmnl,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::MnlRand,
        Family::CnlRand,
        Family::MmnlRand,
        Family::Amzn,
        Family::AmznCnl,
        Family::AmznMmnl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::MnlRand => "mnl-rand",
            Family::CnlRand => "cnl-rand",
            Family::MmnlRand => "mmnl-rand",
            Family::Amzn => "amzn",
            Family::AmznCnl => "amzn-cnl",
            Family::AmznMmnl => "amzn-mmnl",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::Unsupported(alloc::format!("unknown family '{name}'")))
    }

    /// Draws one instance on `n` products. `s` is the MMNL standard deviation
    /// (ignored by the other families).
    pub fn instantiate<R: Rng + ?Sized>(self, n: usize, s: f64, rng: &mut R) -> Result<GroundTruth> {
        Ok(match self {
            Family::MnlRand => GroundTruth::Mnl(mnl_rand(n, rng)?),
            Family::CnlRand => GroundTruth::Nested(cnl_rand(n, rng)?),
            Family::MmnlRand => GroundTruth::Mixed(mmnl_rand(n, s, rng)?),
            Family::Amzn => GroundTruth::Mnl(amzn_mnl(n)?),
            Family::AmznCnl => GroundTruth::Nested(amzn_cnl(n)?),
            Family::AmznMmnl => GroundTruth::Mixed(amzn_mmnl_with(n, [0.0; 3], s, rng.random())?),
        })
    }
}

impl core::fmt::Display for Family {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Self::from_name(s).map_err(|e| alloc::format!("{e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::Assortment;
    use crate::models::ChoiceProbabilities;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_is_complete() {
        let t = amzn_table();
        assert_eq!(t.len(), 15);
        assert_eq!(t[11].id, 12);
        assert_eq!(t[11].votes, 32541.0);
    }

    #[test]
    fn product_twelve_utility() {
        let p = amzn_table()[11];
        assert!((p.fitted_utility() - (-3.58987)).abs() < 1e-5);
        assert!((p.fitted_utility() - p.mean_utility).abs() < 1e-3);
    }

    #[test]
    fn cnl_preset() {
        let m = amzn_cnl(AMZN_N).unwrap();
        assert_eq!(m.nests().len(), 4);
        assert!(m.alpha().iter().all(|a| (a - 1.0 / 16.0).abs() < 1e-15));
        assert_eq!(m.rho(), 0.5);
        let small = amzn_cnl(7).unwrap();
        assert_eq!(small.nests(), &[alloc::vec![1, 2, 3, 4, 5], alloc::vec![6]]);
        assert!((small.alpha()[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn families_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Assortment::new([1, 3, 5]);
        for f in Family::ALL {
            let m = f.instantiate(6, 0.25, &mut rng).unwrap();
            let p = m.choice_probs(&a).unwrap();
            let tol = if matches!(m, GroundTruth::Mixed(_)) { 1e-6 } else { 1e-9 };
            assert!((p.iter().sum::<f64>() - 1.0).abs() < tol, "{f}");
        }
        assert!(Family::from_name("nope").is_err());
        assert_eq!(amzn_prices(3).unwrap().as_slice(), &[0.0, 115.49, 92.03]);
    }
}
