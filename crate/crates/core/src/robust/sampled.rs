use alloc::format;
use alloc::vec::Vec;

use rand::RngCore;

use super::brute::solve_columns;
use super::{Method, RobustQuery, RobustResult, RobustStatus};
use crate::choice::{RankList, Sense, SparseChoiceModel};
use crate::models::{MmnlModel, MnlModel};
use crate::{Error, Result};

/// A distribution ψ over rank lists used to pick dual constraints.
pub trait RankSampler {
    fn n(&self) -> usize;
    fn sample_ranking(&self, rng: &mut dyn RngCore) -> RankList;
}

/// Uniform over all rank lists of `n` products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformSampler {
    pub n: usize,
}

impl RankSampler for UniformSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn sample_ranking(&self, rng: &mut dyn RngCore) -> RankList {
        RankList::random(self.n, rng).expect("sampler universe has at least two products")
    }
}

impl RankSampler for MnlModel {
    fn n(&self) -> usize {
        MnlModel::n(self)
    }

    fn sample_ranking(&self, rng: &mut dyn RngCore) -> RankList {
        MnlModel::sample_ranking(self, rng)
    }
}

impl RankSampler for MmnlModel {
    fn n(&self) -> usize {
        MmnlModel::n(self)
    }

    fn sample_ranking(&self, rng: &mut dyn RngCore) -> RankList {
        MmnlModel::sample_ranking(self, rng)
    }
}

impl RankSampler for SparseChoiceModel {
    fn n(&self) -> usize {
        SparseChoiceModel::n(self)
    }

    fn sample_ranking(&self, rng: &mut dyn RngCore) -> RankList {
        let u: f64 = rand::Rng::random(rng);
        self.pick(u).clone()
    }
}

/// Dual LP restricted to `n_samples` rank lists drawn from `sampler`.
///
/// Draws are consumed sequentially, so with the same seed a larger sample
/// contains every rank list of a smaller one. Duplicates are removed. For a
/// minimum the value is never below the exact optimum (for a maximum, never
/// above it).
pub fn robust_sampled_dual(
    q: &RobustQuery,
    n_samples: usize,
    sampler: &dyn RankSampler,
    rng: &mut dyn RngCore,
) -> Result<RobustResult> {
    if sampler.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: q.n(),
            got: sampler.n(),
        });
    }
    let columns: Vec<RankList> = (0..n_samples).map(|_| sampler.sample_ranking(rng)).collect();
    let mut res = robust_sampled_columns(q, &columns)?;
    res.log.insert(0, format!("{n_samples} draws"));
    Ok(res)
}

/// Dual LP restricted to an explicit set of rank lists.
pub fn robust_sampled_columns(q: &RobustQuery, columns: &[RankList]) -> Result<RobustResult> {
    q.check()?;
    let mut cols = columns.to_vec();
    for c in &cols {
        q.scheme().check_rank_list(c)?;
    }
    cols.sort_unstable();
    cols.dedup();
    let distinct = cols.len();
    let mut res = solve_columns(q, &cols, Method::Sampled)?.ok_or_else(|| {
        let dir = match q.sense {
            Sense::Min => "above",
            Sense::Max => "below",
        };
        Error::Unbounded(format!(
            "sampled dual is unbounded {dir}: the {distinct} distinct sampled rank lists cannot reproduce the data; raise n_samples"
        ))
    })?;
    res.status = RobustStatus::Restricted;
    res.log.insert(0, format!("{distinct} distinct rank lists"));
    Ok(res)
}
