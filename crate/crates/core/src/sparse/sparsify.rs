use alloc::vec::Vec;

use rand::RngCore;

use crate::choice::{Assortment, PriceVector, SparseChoiceModel};
use crate::models::ChoiceProbabilities;
use crate::robust::RankSampler;
use crate::{Error, Result};

/// Number of draws `M = ceil((2 C² p_max² / ε²)(ln 2C + C ln N))`.
pub fn sparsify_sample_size(n: usize, epsilon: f64, c_max: usize, p_max: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidData(alloc::format!("epsilon = {epsilon} must be positive")));
    }
    if c_max == 0 || n < 2 {
        return Err(Error::InvalidData("need C ≥ 1 and N ≥ 2".into()));
    }
    let c = c_max as f64;
    let m = 2.0 * c * c * p_max * p_max / (epsilon * epsilon) * (libm::log(2.0 * c) + c * libm::log(n as f64));
    Ok(libm::ceil(m).max(1.0) as usize)
}

/// Empirical model of `M` rank lists drawn from `sampler`, with `M` from
/// [`sparsify_sample_size`] for the largest price.
pub fn sparsify(
    sampler: &dyn RankSampler,
    epsilon: f64,
    c_max: usize,
    prices: &PriceVector,
    rng: &mut dyn RngCore,
) -> Result<SparseChoiceModel> {
    if prices.n() != sampler.n() {
        return Err(Error::DimensionMismatch {
            expected: sampler.n(),
            got: prices.n(),
        });
    }
    let m = sparsify_sample_size(sampler.n(), epsilon, c_max, prices.max())?;
    SparseChoiceModel::from_weights((0..m).map(|_| (sampler.sample_ranking(rng), 1.0)))
}

/// Every assortment with between 1 and `c_max` products.
pub fn small_assortments(n: usize, c_max: usize) -> Vec<Assortment> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn grow(next: usize, n: usize, c_max: usize, stack: &mut Vec<usize>, out: &mut Vec<Assortment>) {
        for p in next..n {
            stack.push(p);
            out.push(Assortment::new(stack.iter().copied()));
            if stack.len() < c_max {
                grow(p + 1, n, c_max, stack, out);
            }
            stack.pop();
        }
    }
    grow(1, n, c_max, &mut stack, &mut out);
    out
}

/// `max |R(M) − R̂(M)|` over every assortment of at most `c_max` products.
pub fn max_revenue_gap(
    truth: &dyn ChoiceProbabilities,
    approx: &dyn ChoiceProbabilities,
    c_max: usize,
    prices: &PriceVector,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in small_assortments(truth.n(), c_max) {
        worst = worst.max((truth.revenue(&a, prices)? - approx.revenue(&a, prices)?).abs());
    }
    Ok(worst)
}
