use alloc::format;
use alloc::vec::Vec;

use super::{robust_bruteforce, ConstraintMode, Method, RobustQuery, RobustResult};
use crate::choice::{Assortment, DataVector, ObservationScheme, PriceVector, RowIndex, Sense};
use crate::models::TransactionCounts;
use crate::{Error, Result};

/// Default interval width multiplier.
pub const DEFAULT_Z: f64 = 3.15;
/// Tuples with at most this many purchases get no interval.
pub const MIN_COUNT: u64 = 6;

const Z_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalOptions {
    pub z: f64,
    pub min_count: u64,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        Self {
            z: DEFAULT_Z,
            min_count: MIN_COUNT,
        }
    }
}

/// Transaction-scheme data with confidence intervals from purchase counts.
///
/// For a tuple `t = (i, M)` with `C = C_iM` purchases out of `T = Σ_k C_kM`
/// arrivals, `ŷ = C / T`, `ε = sqrt((1 − ŷ) / C)` and the interval is
/// `[ŷ(1 − zε), ŷ(1 + zε)]`. No-purchase tuples and tuples with
/// `C ≤ min_count` get the vacuous interval `[0, 1]`.
pub fn interval_data(counts: &TransactionCounts, opts: &IntervalOptions) -> Result<DataVector> {
    if !(opts.z >= 0.0 && opts.z.is_finite()) {
        return Err(Error::InvalidData(format!("z = {} must be finite and nonnegative", opts.z)));
    }
    let scheme = ObservationScheme::transaction(counts.n, counts.assortments.clone())?;
    let mut values = Vec::with_capacity(scheme.m());
    let mut intervals = Vec::with_capacity(scheme.m());
    for row in scheme.rows() {
        let RowIndex::Sale { i, m } = *row else {
            unreachable!("transaction scheme has only sale rows")
        };
        let total = counts.total(m);
        let c = counts.count(m, i);
        let y = if total == 0 { 0.0 } else { c as f64 / total as f64 };
        values.push(y);
        if i == 0 || c <= opts.min_count {
            intervals.push((0.0, 1.0));
        } else {
            let eps = libm::sqrt((1.0 - y) / c as f64);
            intervals.push((y * (1.0 - opts.z * eps), y * (1.0 + opts.z * eps)));
        }
    }
    DataVector::with_intervals(scheme, values, intervals)
}

/// Minimum conversion rate of `target` (unit prices) over all distributions
/// whose purchase probabilities fall in the count-based intervals. Solved over
/// all N! rank lists, so `N ≤ 8`.
pub fn robust_conversion_interval(
    counts: &TransactionCounts,
    target: &Assortment,
    opts: &IntervalOptions,
) -> Result<RobustResult> {
    let data = interval_data(counts, opts)?;
    let q = RobustQuery::new(
        data,
        target.clone(),
        PriceVector::unit(counts.n),
        Sense::Min,
        ConstraintMode::Interval,
    )?;
    match robust_bruteforce(&q) {
        Ok(mut res) => {
            res.method = Method::Interval;
            res.log.push(format!("z = {}", opts.z));
            Ok(res)
        }
        Err(Error::Infeasible(_)) => Err(Error::Infeasible(format!(
            "interval constraints are infeasible at z = {}; find_min_feasible_z gives the smallest feasible z",
            opts.z
        ))),
        Err(e) => Err(e),
    }
}

/// Smallest `z` (within `tol`) for which the interval constraints admit a
/// distribution, by doubling then bisection.
pub fn find_min_feasible_z(counts: &TransactionCounts, min_count: u64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidData("bisection tolerance must be positive".into()));
    }
    let feasible = |z: f64| -> Result<bool> {
        let opts = IntervalOptions { z, min_count };
        match robust_conversion_interval(counts, &Assortment::empty(), &opts) {
            Ok(_) => Ok(true),
            Err(Error::Infeasible(_)) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if feasible(0.0)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while !feasible(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > Z_CAP {
            return Err(Error::Infeasible(format!("no feasible z up to {Z_CAP}")));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
