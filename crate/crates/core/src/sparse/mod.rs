//! Sparsest-fit recovery and identifiability diagnostics.
//!
//! [`sparsest_fit`] reads the support of a choice model off noiseless data,
//! which works whenever every atom owns a data row (signature) and no small
//! integer combination of the masses vanishes (linear independence); both are
//! checked by [`check_conditions`]. The rest covers recovery-rate sweeps,
//! sparsification by sampling, and the support of worst-case basic solutions.

mod audit;
mod conditions;
mod fit;
mod phase;
mod sparsify;

pub use audit::{augmented_rank, bfs_sparsity_audit, AuditReport, SparseSupport};
pub use conditions::{
    check_conditions, check_linear_independence, check_signature, ConditionReport, Independence,
    IndependenceReport, SignatureReport, MAX_EXHAUSTIVE,
};
pub use fit::{decode_column, sparsest_fit, FitStatus, RecoveredAtom, SparsestFitOutput, SUBSET_SUM_TOL};
pub use phase::{
    recovery_phase_diagram, recovery_trial, same_model, trial_seed, PhaseCell, PhaseSpec, DEFAULT_MASS_RANGE,
};
pub use sparsify::{max_revenue_gap, small_assortments, sparsify, sparsify_sample_size};
