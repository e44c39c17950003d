use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::fit::{sparsest_fit, SUBSET_SUM_TOL};
use crate::choice::{exact_marginals, ObservationScheme, SchemeKind, SparseChoiceModel};
use crate::models::{generate_random_model, GenerativeSpec};
use crate::Result;

/// Default interval for the unnormalized masses of generated models.
pub const DEFAULT_MASS_RANGE: (f64, f64) = (1.0, 2.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpec {
    pub kind: SchemeKind,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub trials: usize,
    pub mass_range: (f64, f64),
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub recovered: usize,
}

impl PhaseCell {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.recovered as f64 / self.trials as f64
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of trial `t` in cell `(n, k)`; independent of how trials are scheduled.
pub fn trial_seed(seed: u64, n: usize, k: usize, t: usize) -> u64 {
    [n as u64, k as u64, t as u64].iter().fold(splitmix(seed), |h, &v| splitmix(h ^ v))
}

/// Same support and masses within `tol`.
pub fn same_model(a: &SparseChoiceModel, b: &SparseChoiceModel, tol: f64) -> bool {
    a.len() == b.len()
        && a.sorted_atoms()
            .iter()
            .zip(b.sorted_atoms().iter())
            .all(|(x, y)| x.ranks == y.ranks && (x.prob - y.prob).abs() <= tol)
}

/// Draws a model, encodes it under `scheme` and checks whether the sparsest
/// fit returns exactly that model.
pub fn recovery_trial(scheme: &ObservationScheme, k: usize, mass_range: (f64, f64), seed: u64) -> Result<bool> {
    let spec = GenerativeSpec::new(k, mass_range.0, mass_range.1, seed)?;
    let truth = generate_random_model(&spec, scheme.n())?;
    let y = exact_marginals(&truth, scheme)?;
    let fit = sparsest_fit(&y)?;
    Ok(fit.model.is_some_and(|m| same_model(&m, &truth, SUBSET_SUM_TOL)))
}

/// Exact-recovery counts over the grid `ns × ks`, cells in row-major order.
pub fn recovery_phase_diagram(spec: &PhaseSpec) -> Result<Vec<PhaseCell>> {
    let mut cells = Vec::with_capacity(spec.ns.len() * spec.ks.len());
    for &n in &spec.ns {
        let scheme = ObservationScheme::new(n, spec.kind.clone())?;
        for &k in &spec.ks {
            let mut recovered = 0;
            for t in 0..spec.trials {
                if recovery_trial(&scheme, k, spec.mass_range, trial_seed(spec.seed, n, k, t))? {
                    recovered += 1;
                }
            }
            cells.push(PhaseCell {
                n,
                k,
                trials: spec.trials,
                recovered,
            });
        }
    }
    Ok(cells)
}
