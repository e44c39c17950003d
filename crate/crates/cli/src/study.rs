//! Simulation study: draw ground-truth models, observe their exact censored
//! pairwise marginals, and compare robust revenue bounds with true revenue on
//! random assortments.

use anyhow::{bail, Result};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use robustchoice_core::choice::{Assortment, PriceVector, Sense};
use robustchoice_core::models::presets::{amzn_prices, Family};
use robustchoice_core::models::{simulate_pairwise_marginals, ChoiceProbabilities, GroundTruth};
use robustchoice_core::robust::{ConstraintMode, Method, RobustQuery};
use robustchoice_core::sparse::trial_seed;
use robustchoice_core::Error;

use crate::format::g12;
use crate::io::csv_table;
use crate::methods::{solve, MethodOptions};

/// Histogram bin width on the relative-error axis.
pub const BIN_WIDTH: f64 = 0.05;
/// Bins covering `[0, 1)`; one overflow bin follows.
pub const BINS: usize = 20;
/// Cells whose robust minimum is at most this are excluded.
pub const MIN_BOUND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Family(Family),
    /// The same model for every instance.
    Model(GroundTruth),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub source: Source,
    pub n: usize,
    pub instances: usize,
    pub assortments: usize,
    /// Inclusive range of assortment sizes, not counting product 0.
    pub sizes: (usize, usize),
    pub seed: u64,
    pub method: Method,
    /// MMNL standard deviation.
    pub s: f64,
    pub opts: MethodOptions,
    /// Also compute the robust maximum.
    pub with_max: bool,
}

impl ExperimentSpec {
    pub fn new(source: Source, n: usize, seed: u64) -> Self {
        Self {
            source,
            n,
            instances: 10,
            assortments: 10,
            sizes: (1, (n - 1).min(7)),
            seed,
            method: Method::Brute,
            s: 0.25,
            opts: MethodOptions::default(),
            with_max: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("need at least two products (got n = {})", self.n);
        }
        let (lo, hi) = self.sizes;
        if lo < 1 || lo > hi || hi > self.n - 1 {
            bail!("assortment sizes {lo}..={hi} must lie within 1..={}", self.n - 1);
        }
        if self.instances == 0 || self.assortments == 0 {
            bail!("instance and assortment counts must be at least 1");
        }
        if let Source::Model(m) = &self.source {
            if m.n() != self.n {
                bail!("model has {} products but n = {}", m.n(), self.n);
            }
        }
        if self.method == Method::Interval {
            bail!("the interval method needs transaction counts; use crossval");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub instance: usize,
    pub assortment: String,
    pub size: usize,
    pub r_true: f64,
    pub r_min: f64,
    pub r_max: Option<f64>,
    /// `(r_true - r_min) / r_min`.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub instance: usize,
    pub assortment: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutput {
    pub records: Vec<ErrorRecord>,
    pub excluded: Vec<Exclusion>,
    /// `BINS` bins of width `BIN_WIDTH` from 0, then the overflow bin.
    pub histogram: Vec<usize>,
}

impl StudyOutput {
    pub fn mean_rel_error(&self) -> f64 {
        if self.records.is_empty() {
            return f64::NAN;
        }
        self.records.iter().map(|r| r.rel_error).sum::<f64>() / self.records.len() as f64
    }

    pub fn records_csv(&self) -> Result<String> {
        csv_table(
            &["instance", "assortment", "size", "r_true", "r_min", "r_max", "rel_error"],
            self.records.iter().map(|r| {
                vec![
                    r.instance.to_string(),
                    r.assortment.clone(),
                    r.size.to_string(),
                    g12(r.r_true),
                    g12(r.r_min),
                    r.r_max.map(g12).unwrap_or_default(),
                    g12(r.rel_error),
                ]
            }),
        )
    }

    pub fn histogram_csv(&self) -> Result<String> {
        csv_table(
            &["lo", "hi", "count"],
            self.histogram.iter().enumerate().map(|(b, &c)| {
                let lo = b as f64 * BIN_WIDTH;
                let hi = if b < BINS { g12((b + 1) as f64 * BIN_WIDTH) } else { "inf".into() };
                vec![g12(lo), hi, c.to_string()]
            }),
        )
    }
}

pub fn histogram(errors: impl IntoIterator<Item = f64>) -> Vec<usize> {
    let mut bins = vec![0; BINS + 1];
    for e in errors {
        let b = if e.is_nan() { BINS } else { ((e.max(0.0) / BIN_WIDTH).floor() as usize).min(BINS) };
        bins[b] += 1;
    }
    bins
}

fn random_assortment<R: Rng>(n: usize, sizes: (usize, usize), rng: &mut R) -> Assortment {
    let size = rng.random_range(sizes.0..=sizes.1);
    Assortment::new(sample(rng, n - 1, size).into_iter().map(|j| j + 1))
}

struct Instance {
    model: GroundTruth,
    assortments: Vec<Assortment>,
}

fn draw_instance(spec: &ExperimentSpec, index: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, spec.n, 0, index));
    let model = match &spec.source {
        Source::Family(f) => f.instantiate(spec.n, spec.s, &mut rng)?,
        Source::Model(m) => m.clone(),
    };
    let assortments = (0..spec.assortments)
        .map(|_| random_assortment(spec.n, spec.sizes, &mut rng))
        .collect();
    Ok(Instance { model, assortments })
}

enum Cell {
    Record(ErrorRecord),
    Excluded(Exclusion),
}

/// Runs the study. Cells are solved in parallel and merged in input order.
pub fn run_simulation_study(spec: &ExperimentSpec) -> Result<StudyOutput> {
    spec.validate()?;
    let prices = match amzn_prices(spec.n) {
        Ok(p) => p,
        Err(_) => PriceVector::unit(spec.n),
    };
    let mode = match spec.method {
        Method::Censored => ConstraintMode::AtLeast,
        _ => ConstraintMode::Equality,
    };
    let instances: Vec<Instance> = (0..spec.instances)
        .into_par_iter()
        .map(|i| draw_instance(spec, i))
        .collect::<Result<_>>()?;
    let data = instances
        .par_iter()
        .map(|inst| simulate_pairwise_marginals(&inst.model))
        .collect::<Result<Vec<_>, Error>>()?;
    let cells: Vec<(usize, &Assortment)> = instances
        .iter()
        .enumerate()
        .flat_map(|(i, inst)| inst.assortments.iter().map(move |a| (i, a)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(i, a)| -> Result<Cell> {
            let excluded = |reason: String| {
                Ok(Cell::Excluded(Exclusion {
                    instance: i,
                    assortment: a.to_string(),
                    reason,
                }))
            };
            let r_true = instances[i].model.revenue(a, &prices)?;
            let q = RobustQuery::new(data[i].clone(), a.clone(), prices.clone(), Sense::Min, mode)?;
            let r_min = match solve(&q, spec.method, &spec.opts) {
                Ok(r) => r.bound,
                Err(e @ (Error::Infeasible(_) | Error::Unbounded(_))) => return excluded(e.to_string()),
                Err(e) => return Err(e.into()),
            };
            if r_min <= MIN_BOUND {
                return excluded(format!("robust minimum {} is not positive", g12(r_min)));
            }
            let r_max = if spec.with_max {
                let q = q.with_sense(Sense::Max);
                let q = RobustQuery { mode: ConstraintMode::Equality, ..q };
                let method = if spec.method == Method::Censored { Method::Brute } else { spec.method };
                Some(solve(&q, method, &spec.opts)?.bound)
            } else {
                None
            };
            Ok(Cell::Record(ErrorRecord {
                instance: i,
                assortment: a.to_string(),
                size: a.size(),
                r_true,
                r_min,
                r_max,
                rel_error: (r_true - r_min) / r_min,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = StudyOutput {
        records: Vec::new(),
        excluded: Vec::new(),
        histogram: Vec::new(),
    };
    for cell in results {
        match cell {
            Cell::Record(r) => out.records.push(r),
            Cell::Excluded(x) => out.excluded.push(x),
        }
    }
    out.histogram = histogram(out.records.iter().map(|r| r.rel_error));
    Ok(out)
}
