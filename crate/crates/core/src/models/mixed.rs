use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mnl::sample_luce;
use super::{check_assortment, gauss_hermite, ChoiceProbabilities, MnlModel};
use crate::choice::{Assortment, ProductId, RankList};
use crate::{Error, Result};

/// How the mixing integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Integration {
    /// Gauss–Hermite of order 32 for one random coefficient, otherwise Monte
    /// Carlo with 10⁵ draws from `seed`.
    Auto { seed: u64 },
    /// Tensor-product Gauss–Hermite rule.
    GaussHermite { order: usize },
    /// Common random draws shared by every assortment.
    MonteCarlo { draws: usize, seed: u64 },
}

/// Parameters of a mixed logit with utilities `β·x_j`, where
/// `β_i = (1 + η_i) θ_i` and `η_i ~ Normal(μ_i, s²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmnlSpec {
    /// Attribute vectors, one per product; `features[0]` must be zero.
    pub features: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    /// Per-coefficient perturbation means (defaults to zero).
    #[serde(default)]
    pub mu: Vec<f64>,
    pub s: f64,
    pub integration: Integration,
}

/// Mixed multinomial logit, stored as the finite mixture of MNL models given
/// by its integration rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MmnlSpec", into = "MmnlSpec")]
pub struct MmnlModel {
    spec: MmnlSpec,
    n: usize,
    /// Row-major `points × n` weights.
    weights: Vec<f64>,
    mass: Vec<f64>,
}

const AUTO_ORDER: usize = 32;
const AUTO_DRAWS: usize = 100_000;
const MAX_POINTS: usize = 2_000_000;

impl TryFrom<MmnlSpec> for MmnlModel {
    type Error = Error;
    fn try_from(spec: MmnlSpec) -> Result<Self> {
        Self::new(spec)
    }
}

impl From<MmnlModel> for MmnlSpec {
    fn from(m: MmnlModel) -> Self {
        m.spec
    }
}

impl MmnlModel {
    pub fn new(mut spec: MmnlSpec) -> Result<Self> {
        let n = spec.features.len();
        if n < 2 {
            return Err(Error::TooFewProducts(n));
        }
        let d = spec.theta.len();
        if spec.mu.is_empty() {
            spec.mu = alloc::vec![0.0; d];
        }
        if spec.mu.len() != d || spec.features.iter().any(|x| x.len() != d) {
            return Err(Error::InvalidModel("feature, theta and mu dimensions differ".into()));
        }
        if spec.features[0].iter().any(|v| *v != 0.0) {
            return Err(Error::InvalidModel("features of product 0 must be zero".into()));
        }
        if !(spec.s.is_finite() && spec.s >= 0.0) {
            return Err(Error::InvalidModel("s must be finite and nonnegative".into()));
        }
        let etas = perturbations(&spec)?;
        let mut weights = Vec::with_capacity(etas.len() * n);
        let mut mass = Vec::with_capacity(etas.len());
        let mut beta = alloc::vec![0.0; d];
        let mut u = alloc::vec![0.0; n];
        for (eta, m) in etas {
            for i in 0..d {
                beta[i] = (1.0 + eta[i]) * spec.theta[i];
            }
            for (j, x) in spec.features.iter().enumerate() {
                u[j] = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
            }
            let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            weights.extend(u.iter().map(|v| libm::exp(v - top)));
            mass.push(m);
        }
        Ok(Self {
            spec,
            n,
            weights,
            mass,
        })
    }

    pub fn spec(&self) -> &MmnlSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of mixture points.
    pub fn points(&self) -> usize {
        self.mass.len()
    }

    /// The MNL model at the mean coefficients (`η = 0`).
    pub fn mean_mnl(&self) -> Result<MnlModel> {
        MnlModel::new(
            self.spec
                .features
                .iter()
                .map(|x| libm::exp(x.iter().zip(&self.spec.theta).map(|(a, b)| a * b).sum()))
                .collect(),
        )
    }

    pub fn mmnl_prob(&self, j: ProductId, assortment: &Assortment) -> Result<f64> {
        self.choice_prob(j, assortment)
    }

    /// Samples a customer type: a mixture point, then a Luce ranking.
    pub fn sample_ranking<R: Rng + ?Sized>(&self, rng: &mut R) -> RankList {
        let mut u = rng.random::<f64>();
        let mut k = self.mass.len() - 1;
        for (i, m) in self.mass.iter().enumerate() {
            u -= m;
            if u < 0.0 {
                k = i;
                break;
            }
        }
        sample_luce(&self.weights[k * self.n..(k + 1) * self.n], rng)
    }
}

/// Perturbation vectors η and their probability masses.
fn perturbations(spec: &MmnlSpec) -> Result<Vec<(Vec<f64>, f64)>> {
    let d = spec.theta.len();
    if spec.s == 0.0 || d == 0 {
        return Ok(alloc::vec![(spec.mu.clone(), 1.0)]);
    }
    let rule = match spec.integration {
        Integration::Auto { seed } if d == 1 => {
            let _ = seed;
            Integration::GaussHermite { order: AUTO_ORDER }
        }
        Integration::Auto { seed } => Integration::MonteCarlo {
            draws: AUTO_DRAWS,
            seed,
        },
        other => other,
    };
    match rule {
        Integration::GaussHermite { order } => {
            if order == 0 {
                return Err(Error::InvalidModel("quadrature order must be positive".into()));
            }
            let total = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(order));
            if total.is_none_or(|t| t > MAX_POINTS) {
                return Err(Error::TooLarge {
                    n: order,
                    limit: MAX_POINTS,
                });
            }
            let (x, w) = gauss_hermite(order);
            let norm = 1.0 / libm::sqrt(core::f64::consts::PI);
            let scale = core::f64::consts::SQRT_2 * spec.s;
            let mut out = Vec::new();
            let mut idx = alloc::vec![0usize; d];
            loop {
                let eta: Vec<f64> = (0..d).map(|i| spec.mu[i] + scale * x[idx[i]]).collect();
                let m: f64 = idx.iter().map(|&k| w[k] * norm).product();
                out.push((eta, m));
                let mut pos = 0;
                while pos < d {
                    idx[pos] += 1;
                    if idx[pos] < order {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == d {
                    break;
                }
            }
            Ok(out)
        }
        Integration::MonteCarlo { draws, seed } => {
            if draws == 0 || draws > MAX_POINTS {
                return Err(Error::InvalidModel(alloc::format!("{draws} draws")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = 1.0 / draws as f64;
            Ok((0..draws)
                .map(|_| {
                    let eta = (0..d)
                        .map(|i| spec.mu[i] + spec.s * rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    (eta, m)
                })
                .collect())
        }
        Integration::Auto { .. } => unreachable!(),
    }
}

impl ChoiceProbabilities for MmnlModel {
    fn n(&self) -> usize {
        self.n
    }

    fn choice_probs(&self, assortment: &Assortment) -> Result<Vec<f64>> {
        check_assortment(self.n, assortment)?;
        let members = assortment.members();
        let mut probs = alloc::vec![0.0; members.len()];
        for (k, &m) in self.mass.iter().enumerate() {
            let w = &self.weights[k * self.n..(k + 1) * self.n];
            let total: f64 = members.iter().map(|&i| w[i]).sum();
            let f = m / total;
            for (p, &i) in probs.iter_mut().zip(members) {
                *p += f * w[i];
            }
        }
        Ok(probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(s: f64, integration: Integration) -> MmnlSpec {
        MmnlSpec {
            features: vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![1.0, -1.0], vec![1.0, 0.5]],
            theta: vec![-0.5, 0.8],
            mu: vec![],
            s,
            integration,
        }
    }

    fn all_assortments() -> Vec<Assortment> {
        (0u32..8)
            .map(|mask| Assortment::new((1..4).filter(|i| mask & (1 << (i - 1)) != 0)))
            .collect()
    }

    #[test]
    fn zero_variance_is_mnl() {
        let m = MmnlModel::new(spec(0.0, Integration::Auto { seed: 1 })).unwrap();
        assert_eq!(m.points(), 1);
        let mnl = m.mean_mnl().unwrap();
        for a in all_assortments() {
            for &j in a.members() {
                assert!((m.mmnl_prob(j, &a).unwrap() - mnl.mnl_prob(j, &a).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tiny_variance_converges_to_mnl() {
        let m = MmnlModel::new(spec(1e-8, Integration::Auto { seed: 1 })).unwrap();
        let mnl = m.mean_mnl().unwrap();
        for a in all_assortments() {
            for &j in a.members() {
                assert!((m.mmnl_prob(j, &a).unwrap() - mnl.mnl_prob(j, &a).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn quadrature_agrees_with_monte_carlo() {
        let gh = MmnlModel::new(spec(0.3, Integration::GaussHermite { order: 12 })).unwrap();
        let mc = MmnlModel::new(spec(0.3, Integration::MonteCarlo { draws: 100_000, seed: 5 })).unwrap();
        for a in all_assortments() {
            let p = gh.choice_probs(&a).unwrap();
            let q = mc.choice_probs(&a).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for (x, y) in p.iter().zip(&q) {
                assert!((x - y).abs() < 5e-3, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn one_dimensional_uses_quadrature() {
        let s = MmnlSpec {
            features: vec![vec![0.0], vec![1.0], vec![2.0]],
            theta: vec![0.7],
            mu: vec![],
            s: 0.5,
            integration: Integration::Auto { seed: 0 },
        };
        let m = MmnlModel::new(s).unwrap();
        assert_eq!(m.points(), 32);
    }

    #[test]
    fn exchangeable_products() {
        let mut s = spec(0.25, Integration::Auto { seed: 3 });
        s.features[2] = s.features[1].clone();
        let m = MmnlModel::new(s).unwrap();
        let p = m.choice_probs(&Assortment::new([1, 2])).unwrap();
        assert!((p[1] - p[2]).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_rebuilds_points() {
        let m = MmnlModel::new(spec(0.2, Integration::MonteCarlo { draws: 100, seed: 2 })).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: MmnlModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn validation() {
        let mut s = spec(0.1, Integration::Auto { seed: 1 });
        s.features[0][0] = 1.0;
        assert!(MmnlModel::new(s).is_err());
        assert!(MmnlModel::new(spec(-1.0, Integration::Auto { seed: 1 })).is_err());
        assert!(MmnlModel::new(spec(0.1, Integration::GaussHermite { order: 0 })).is_err());
    }
}
