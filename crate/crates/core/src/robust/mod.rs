//! Worst-case (and best-case) revenue over every choice model consistent with
//! observed marginals.
//!
//! All estimators take a [`RobustQuery`]. The primal view is
//!
//! ```text
//! min / max  Σ_σ p(σ, M) λ(σ)   s.t.  A λ (rel) y,  Σ λ = 1,  λ ≥ 0
//! ```
//!
//! where `rel` comes from [`ConstraintMode`] and `p(σ, M)` is the price of the
//! product σ picks from the target assortment. Dual methods report the
//! multipliers `(α, ν)` of the data rows and of the normalization row in a
//! [`Certificate`].

mod brute;
mod canonical;
mod censored;
mod cutting;
mod interval;
mod ranking;
mod sampled;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use brute::robust_bruteforce;
pub use censored::robust_censored_comparison;
pub use cutting::{robust_cutting_plane, DEFAULT_MAX_ROUNDS};
pub use interval::{
    find_min_feasible_z, interval_data, robust_conversion_interval, IntervalOptions, DEFAULT_Z, MIN_COUNT,
};
pub use ranking::robust_ranking_exact;
pub use sampled::{robust_sampled_columns, robust_sampled_dual, RankSampler, UniformSampler};

use crate::choice::{Assortment, DataVector, ObservationScheme, PriceVector, RankList, Sense, SparseChoiceModel};
use crate::lp::Relation;
use crate::{Error, Result};

/// How the data rows constrain `Aλ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    /// `Aλ = y`.
    Equality,
    /// `Aλ ≥ y`.
    AtLeast,
    /// `a ≤ Aλ ≤ b` from the data vector's intervals. Bounds outside `[0, 1]`
    /// are dropped.
    Interval,
}

/// The `(y, M, p)` triple plus objective sense and constraint mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustQuery {
    pub data: DataVector,
    pub target: Assortment,
    pub prices: PriceVector,
    pub sense: Sense,
    pub mode: ConstraintMode,
}

impl RobustQuery {
    pub fn new(
        data: DataVector,
        target: Assortment,
        prices: PriceVector,
        sense: Sense,
        mode: ConstraintMode,
    ) -> Result<Self> {
        let q = Self {
            data,
            target,
            prices,
            sense,
            mode,
        };
        q.check()?;
        Ok(q)
    }

    /// Equality-constrained minimum revenue.
    pub fn min(data: DataVector, target: Assortment, prices: PriceVector) -> Result<Self> {
        Self::new(data, target, prices, Sense::Min, ConstraintMode::Equality)
    }

    /// Same query with the other objective sense.
    pub fn with_sense(&self, sense: Sense) -> Self {
        Self { sense, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn scheme(&self) -> &ObservationScheme {
        self.data.scheme()
    }

    pub(crate) fn check(&self) -> Result<()> {
        let n = self.data.n();
        self.target.check(n)?;
        self.prices.check(n)?;
        if self.mode == ConstraintMode::Interval && self.data.intervals().is_none() {
            return Err(Error::InvalidData("interval mode needs a data vector with intervals".into()));
        }
        Ok(())
    }

    /// Price of the product `sigma` picks from the target.
    pub(crate) fn payoff(&self, sigma: &RankList) -> f64 {
        self.prices.get(sigma.choice(&self.target))
    }

    /// The constraint rows actually imposed on `Aλ`.
    pub(crate) fn data_rows(&self) -> Vec<DataRow> {
        let values = self.data.values();
        match self.mode {
            ConstraintMode::Equality => (0..values.len())
                .map(|t| DataRow {
                    t,
                    rel: Relation::Eq,
                    rhs: values[t],
                })
                .collect(),
            ConstraintMode::AtLeast => (0..values.len())
                .map(|t| DataRow {
                    t,
                    rel: Relation::Ge,
                    rhs: values[t],
                })
                .collect(),
            ConstraintMode::Interval => {
                let mut rows = Vec::new();
                for (t, &(a, b)) in self.data.intervals().unwrap_or(&[]).iter().enumerate() {
                    if a > 0.0 {
                        rows.push(DataRow { t, rel: Relation::Ge, rhs: a });
                    }
                    if b < 1.0 {
                        rows.push(DataRow { t, rel: Relation::Le, rhs: b });
                    }
                }
                rows
            }
        }
    }
}

/// One imposed data constraint `A(·)_t (rel) rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DataRow {
    pub t: usize,
    pub rel: Relation,
    pub rhs: f64,
}

/// Estimator tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Sampled,
    Ranking,
    Cut,
    Censored,
    Interval,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Brute,
        Method::Sampled,
        Method::Ranking,
        Method::Cut,
        Method::Censored,
        Method::Interval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Sampled => "sampled",
            Method::Ranking => "ranking",
            Method::Cut => "cut",
            Method::Censored => "censored",
            Method::Interval => "interval",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::Unsupported(format!("unknown method '{name}'")))
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the reported bound relates to the true optimum of the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobustStatus {
    /// The optimum itself.
    Exact,
    /// From an outer relaxation: never above the minimum (never below the
    /// maximum).
    Relaxed,
    /// From a restriction to sampled rank lists: never below the minimum
    /// (never above the maximum).
    Restricted,
}

/// Dual multipliers: `bound = Σ alpha[k]·rhs[k] + nu`.
///
/// `rows[k]` is the scheme row of the k-th imposed data constraint. For a
/// minimum, feasibility means `Σ alpha[k]·A(σ)_{rows[k]} + nu ≤ p(σ, M)` for
/// every rank list σ covered by the method; for a maximum the inequality is
/// reversed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub rows: Vec<usize>,
    pub rhs: Vec<f64>,
    pub alpha: Vec<f64>,
    pub nu: f64,
    /// Named blocks of inner dual variables, where the method has them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<(String, Vec<f64>)>,
}

impl Certificate {
    /// `Σ alpha·rhs + nu`.
    pub fn value(&self) -> f64 {
        crate::choice::compensated_sum(self.alpha.iter().zip(&self.rhs).map(|(a, r)| a * r)) + self.nu
    }

    /// `Σ alpha[k]·A(σ)_{rows[k]} + nu`.
    pub fn dual_value(&self, scheme: &ObservationScheme, sigma: &RankList) -> f64 {
        let rows = scheme.rows();
        let mut s = self.nu;
        for (k, &t) in self.rows.iter().enumerate() {
            if scheme.entry(sigma, rows[t]) {
                s += self.alpha[k];
            }
        }
        s
    }

    /// Largest violation of the dual constraints over `sigmas`.
    pub fn violation(&self, q: &RobustQuery, sigmas: &[RankList]) -> f64 {
        let scheme = q.scheme();
        sigmas
            .iter()
            .map(|s| {
                let d = self.dual_value(scheme, s) - q.payoff(s);
                match q.sense {
                    Sense::Min => d,
                    Sense::Max => -d,
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Outcome of a robust estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustResult {
    pub bound: f64,
    pub method: Method,
    pub sense: Sense,
    pub status: RobustStatus,
    /// An optimal (or, for the cutting plane, verified) distribution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<SparseChoiceModel>,
    /// Number of witness entries above 1e-9 before renormalization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Per-round bounds of iterative methods.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<String>,
}

impl RobustResult {
    pub(crate) fn new(bound: f64, method: Method, sense: Sense, status: RobustStatus) -> Self {
        Self {
            bound,
            method,
            sense,
            status,
            witness: None,
            support: None,
            certificate: None,
            rounds: Vec::new(),
            log: Vec::new(),
        }
    }
}

/// Largest violation of the query's data constraints by `model`.
pub fn data_violation(q: &RobustQuery, model: &SparseChoiceModel) -> Result<f64> {
    let y = crate::choice::exact_marginals(model, q.scheme())?;
    let got = y.values();
    Ok(q.data_rows()
        .iter()
        .map(|r| {
            let v = got[r.t];
            match r.rel {
                Relation::Eq => (v - r.rhs).abs(),
                Relation::Ge => (r.rhs - v).max(0.0),
                Relation::Le => (v - r.rhs).max(0.0),
            }
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests;
