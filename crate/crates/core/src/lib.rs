//! Nonparametric choice modeling over rank lists.
//!
//! A customer type is a strict preference ordering over `N` products, product
//! `0` being the no-purchase option, and a choice model is a distribution over
//! those orderings. Observed sales data only constrains a handful of linear
//! marginals of that distribution. This crate computes worst-case (and
//! best-case) revenue for an assortment over every distribution consistent
//! with the marginals, recovers the sparsest consistent distribution when it is
//! identifiable, and ships the parametric generators (MNL, nested/cross-nested
//! logit, mixed logit) used as ground truth.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel experiment drivers live in the `robustchoice` crate.
//!
//! Module map:
//!
//! * [`choice`]: rank lists, assortments, choice models, observation schemes
//!   and the revenue functional.
//! * [`lp`]: a dense two-phase simplex returning primal, dual and basis.
//! * [`models`]: parametric ground-truth families and transaction simulation.
//! * [`robust`]: the robust revenue estimators.
//! * [`sparse`]: sparsest-fit recovery and identifiability diagnostics.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod choice;
mod error;
pub mod lp;
pub mod models;
pub mod robust;
pub mod sparse;

pub use error::{Error, Result};

/// Tolerance used when validating that a distribution sums to one.
pub const NORMALIZATION_TOL: f64 = 1e-12;
