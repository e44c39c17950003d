use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use robustchoice_core::choice::{exact_marginals, Assortment, DataVector, ObservationScheme, PriceVector, SchemeKind};
use robustchoice_core::models::presets::Family;
use robustchoice_core::models::{event_marginals, generate_random_model, simulate_transactions, GenerativeSpec, GroundTruth};
use robustchoice_core::robust::{
    find_min_feasible_z, interval_data, robust_bruteforce, ConstraintMode, IntervalOptions, Method, RobustQuery,
    DEFAULT_MAX_ROUNDS, MIN_COUNT,
};
use robustchoice_core::sparse::{recovery_trial, sparsest_fit, trial_seed, PhaseCell, DEFAULT_MASS_RANGE};

use crate::crossval::{run_kfold_cv, CvOptions, ZChoice};
use crate::format::{g12, json, json_exact};
use crate::io::{csv_table, emit, read_assortments, read_json, read_transactions, transactions_csv};
use crate::methods::{solve, MethodOptions};
use crate::pool;
use crate::study::{run_simulation_study, ExperimentSpec, Source};

/// Robust revenue estimation and sparse recovery for rank-list choice models.
#[derive(Debug, Parser)]
#[command(name = "robustchoice", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a ground-truth model and write it as JSON.
    Generate(GenerateArgs),
    /// Exact marginals of a model under an observation scheme.
    Marginals(MarginalsArgs),
    /// Simulate purchase counts on a list of assortments.
    Simulate(SimulateArgs),
    /// Robust revenue bound for one assortment.
    Predict(PredictArgs),
    /// Sparsest model consistent with noiseless data.
    Sparsefit(SparsefitArgs),
    /// Exact-recovery rates of the sparsest fit over a grid of (N, K).
    PhaseDiagram(PhaseArgs),
    /// Relative error of robust bounds against true revenue.
    Study(StudyArgs),
    /// k-fold cross-validation of conversion-rate predictions.
    Crossval(CrossvalArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SenseArg {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Equality,
    AtLeast,
    Interval,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// mnl-rand, cnl-rand, mmnl-rand, amzn, amzn-cnl, amzn-mmnl or sparse.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// MMNL standard deviation.
    #[arg(long, default_value_t = 0.25)]
    s: f64,
    /// Support size of a sparse model.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Interval of unnormalized sparse masses, `a:b`.
    #[arg(long, value_parser = parse_f64_range)]
    mass_range: Option<(f64, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MarginalsArgs {
    #[arg(long)]
    model: PathBuf,
    /// comparison, ranking, top-set, transaction or censored-comparison.
    #[arg(long)]
    scheme: String,
    /// JSON list of product lists, for the transaction scheme.
    #[arg(long)]
    assortments: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    assortments: PathBuf,
    /// Customers per assortment.
    #[arg(long)]
    arrivals: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Data vector JSON.
    #[arg(long, conflicts_with = "transactions", required_unless_present = "transactions")]
    data: Option<PathBuf>,
    /// Transactions CSV; implies interval constraints.
    #[arg(long)]
    transactions: Option<PathBuf>,
    /// Number of products including 0, for transactions.
    #[arg(long)]
    n: Option<usize>,
    /// Offered products, comma separated.
    #[arg(long)]
    target: String,
    /// Prices of products 1..N-1, comma separated (default all 1).
    #[arg(long)]
    prices: Option<String>,
    #[arg(long, default_value = "brute")]
    method: String,
    #[arg(long, value_enum, default_value = "min")]
    sense: SenseArg,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    rounds: usize,
    /// Interval width multiplier, or `auto` for the smallest feasible one.
    #[arg(long, default_value = "auto")]
    z: String,
    #[arg(long, default_value_t = MIN_COUNT)]
    min_count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SparsefitArgs {
    #[arg(long)]
    data: PathBuf,
    /// Expected scheme; an error if the data use another one.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PhaseArgs {
    #[arg(long)]
    scheme: String,
    /// Inclusive range `a:b`.
    #[arg(long, value_parser = parse_usize_range)]
    n_range: (usize, usize),
    /// Inclusive range `a:b`.
    #[arg(long, value_parser = parse_usize_range)]
    k_range: (usize, usize),
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_f64_range)]
    mass_range: Option<(f64, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// Generator family.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    family: Option<String>,
    /// A fixed ground-truth model used for every instance.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 10)]
    assortments: usize,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    /// Default min(N-1, 7).
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "brute")]
    method: String,
    #[arg(long, default_value_t = 0.25)]
    s: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    rounds: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Also compute the robust maximum.
    #[arg(long)]
    with_max: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the error histogram CSV.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CrossvalArgs {
    #[arg(long)]
    transactions: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interval width multiplier, or `auto`.
    #[arg(long, default_value = "auto")]
    z: String,
    #[arg(long, default_value_t = MIN_COUNT)]
    min_count: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write per-assortment predictions CSV.
    #[arg(long)]
    predictions: Option<PathBuf>,
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<T>().map_err(|_| format!("bad bound '{t}'"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_usize_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = parse_range(s)?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

fn parse_f64_range(s: &str) -> Result<(f64, f64), String> {
    parse_range(s)
}

fn parse_z(s: &str) -> Result<ZChoice> {
    if s == "auto" {
        return Ok(ZChoice::Auto);
    }
    let z: f64 = s.parse().map_err(|_| anyhow!("--z takes a number or 'auto', got '{s}'"))?;
    Ok(ZChoice::Fixed(z))
}

fn parse_prices(s: Option<&str>, n: usize) -> Result<PriceVector> {
    let Some(s) = s else {
        return Ok(PriceVector::unit(n));
    };
    let p = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("bad price '{t}'")))
        .collect::<Result<Vec<_>>>()?;
    if p.len() != n - 1 {
        bail!("expected {} prices (products 1..{}), got {}", n - 1, n - 1, p.len());
    }
    Ok(PriceVector::from_products(&p)?)
}

fn out(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let model = if a.family == "sparse" {
        let (lo, hi) = a.mass_range.unwrap_or(DEFAULT_MASS_RANGE);
        let spec = GenerativeSpec::new(a.k, lo, hi, a.seed)?;
        GroundTruth::Sparse {
            model: generate_random_model(&spec, a.n)?,
        }
    } else {
        let family = Family::from_name(&a.family)?;
        family.instantiate(a.n, a.s, &mut ChaCha8Rng::seed_from_u64(a.seed))?
    };
    emit(out(&a.out), &json_exact(&model)?)
}

fn scheme_from(name: &str, n: usize, assortments: Option<&Path>) -> Result<ObservationScheme> {
    let list = assortments.map(|p| read_assortments(p, n)).transpose()?;
    Ok(ObservationScheme::new(n, SchemeKind::from_name(name, list)?)?)
}

fn marginals(a: &MarginalsArgs) -> Result<()> {
    let model: GroundTruth = read_json(&a.model)?;
    let n = robustchoice_core::models::ChoiceProbabilities::n(&model);
    let scheme = scheme_from(&a.scheme, n, a.assortments.as_deref())?;
    let y = match (&model, scheme.kind()) {
        (GroundTruth::Sparse { model }, _) => exact_marginals(model, &scheme)?,
        (_, SchemeKind::Transaction(_) | SchemeKind::CensoredComparison) => event_marginals(&model, &scheme)?,
        (GroundTruth::Mnl(m), _) => exact_marginals(&m.to_rank_distribution()?, &scheme)?,
        (other, kind) => bail!(
            "{} marginals of a {} model are not available; use a purchase-event scheme",
            kind.name(),
            other.name()
        ),
    };
    emit(out(&a.out), &json_exact(&y)?)
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let model: GroundTruth = read_json(&a.model)?;
    let n = robustchoice_core::models::ChoiceProbabilities::n(&model);
    let list = read_assortments(&a.assortments, n)?;
    let counts = simulate_transactions(&model, &list, a.arrivals, &mut ChaCha8Rng::seed_from_u64(a.seed))?;
    emit(out(&a.out), &transactions_csv(&counts)?)
}

fn predict(a: &PredictArgs) -> Result<()> {
    let method = Method::from_name(&a.method)?;
    let sense = match a.sense {
        SenseArg::Min => robustchoice_core::choice::Sense::Min,
        SenseArg::Max => robustchoice_core::choice::Sense::Max,
    };
    let opts = MethodOptions {
        samples: a.samples,
        rounds: a.rounds,
        seed: a.seed,
    };
    let result = if let Some(path) = &a.transactions {
        if a.mode.is_some_and(|m| !matches!(m, ModeArg::Interval)) {
            bail!("transactions imply interval constraints; drop --mode");
        }
        let counts = read_transactions(path, a.n)?;
        let z = match parse_z(&a.z)? {
            ZChoice::Fixed(z) => z,
            ZChoice::Auto => find_min_feasible_z(&counts, a.min_count, 1e-3)?,
        };
        let data = interval_data(&counts, &IntervalOptions { z, min_count: a.min_count })?;
        let target = Assortment::parse(&a.target, counts.n)?;
        let prices = parse_prices(a.prices.as_deref(), counts.n)?;
        let q = RobustQuery::new(data, target, prices, sense, ConstraintMode::Interval)?;
        let mut res = match method {
            Method::Interval => robust_bruteforce(&q)?,
            other => solve(&q, other, &opts)?,
        };
        res.method = method;
        res.log.push(format!("z = {}", g12(z)));
        res
    } else {
        if method == Method::Interval {
            bail!("the interval method needs --transactions");
        }
        let data: DataVector = read_json(a.data.as_deref().expect("clap requires --data"))?;
        let n = data.n();
        let mode = match a.mode {
            Some(ModeArg::Equality) => ConstraintMode::Equality,
            Some(ModeArg::AtLeast) => ConstraintMode::AtLeast,
            Some(ModeArg::Interval) => ConstraintMode::Interval,
            None if method == Method::Censored => ConstraintMode::AtLeast,
            None if data.is_point() => ConstraintMode::Equality,
            None => ConstraintMode::Interval,
        };
        let target = Assortment::parse(&a.target, n)?;
        let prices = parse_prices(a.prices.as_deref(), n)?;
        solve(&RobustQuery::new(data, target, prices, sense, mode)?, method, &opts)?
    };
    emit(out(&a.out), &json(&result)?)
}

fn sparsefit(a: &SparsefitArgs) -> Result<()> {
    let data: DataVector = read_json(&a.data)?;
    if !data.is_point() {
        bail!("sparsefit needs noiseless point data; the input carries intervals");
    }
    if let Some(name) = &a.scheme {
        let want = SchemeKind::from_name(name, Some(Vec::new()))?;
        if want.name() != data.scheme().kind().name() {
            bail!("data use the {} scheme, not {}", data.scheme().kind().name(), want.name());
        }
    }
    emit(out(&a.out), &json(&sparsest_fit(&data)?)?)
}

fn phase_diagram(a: &PhaseArgs) -> Result<()> {
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let kind = SchemeKind::from_name(&a.scheme, None)?;
    let mass = a.mass_range.unwrap_or(DEFAULT_MASS_RANGE);
    let (n_lo, n_hi) = a.n_range;
    let (k_lo, k_hi) = a.k_range;
    if k_lo == 0 {
        bail!("support sizes start at 1");
    }
    let mut cells = Vec::new();
    for n in n_lo..=n_hi {
        let scheme = ObservationScheme::new(n, kind.clone())?;
        for k in k_lo..=k_hi {
            let recovered = (0..a.trials)
                .into_par_iter()
                .map(|t| recovery_trial(&scheme, k, mass, trial_seed(a.seed, n, k, t)))
                .collect::<Result<Vec<bool>, _>>()?
                .into_iter()
                .filter(|&ok| ok)
                .count();
            cells.push(PhaseCell {
                n,
                k,
                trials: a.trials,
                recovered,
            });
        }
    }
    let text = csv_table(
        &["n", "k", "trials", "recovered", "rate"],
        cells.iter().map(|c| {
            vec![
                c.n.to_string(),
                c.k.to_string(),
                c.trials.to_string(),
                c.recovered.to_string(),
                g12(c.rate()),
            ]
        }),
    )?;
    emit(out(&a.out), &text)
}

fn study(a: &StudyArgs) -> Result<()> {
    let source = match (&a.family, &a.model) {
        (Some(f), _) => Source::Family(Family::from_name(f)?),
        (None, Some(p)) => Source::Model(read_json(p)?),
        (None, None) => unreachable!("clap requires --family or --model"),
    };
    let mut spec = ExperimentSpec::new(source, a.n, a.seed);
    spec.instances = a.instances;
    spec.assortments = a.assortments;
    spec.sizes = (a.min_size, a.max_size.unwrap_or(spec.sizes.1));
    spec.method = Method::from_name(&a.method)?;
    spec.s = a.s;
    spec.opts = MethodOptions {
        samples: a.samples,
        rounds: a.rounds,
        seed: a.seed,
    };
    spec.with_max = a.with_max;
    let res = run_simulation_study(&spec)?;
    for x in &res.excluded {
        warn(&format!("instance {} assortment {} excluded: {}", x.instance, x.assortment, x.reason));
    }
    eprintln!(
        "{} records, {} excluded, mean relative error {}",
        res.records.len(),
        res.excluded.len(),
        g12(res.mean_rel_error())
    );
    if let Some(h) = &a.histogram {
        emit(Some(h), &res.histogram_csv()?)?;
    }
    emit(out(&a.out), &res.records_csv()?)
}

fn crossval(a: &CrossvalArgs) -> Result<()> {
    let counts = read_transactions(&a.transactions, a.n)?;
    let opts = CvOptions {
        k: a.k,
        seed: a.seed,
        z: parse_z(&a.z)?,
        min_count: a.min_count,
    };
    let res = run_kfold_cv(&counts, &opts)?;
    for w in &res.warnings {
        warn(w);
    }
    if let Some(p) = &a.predictions {
        emit(Some(p), &res.predictions_csv()?)?;
    }
    emit(out(&a.out), &res.summary_csv()?)
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Marginals(a) => marginals(a),
        Command::Simulate(a) => simulate(a),
        Command::Predict(a) => predict(a),
        Command::Sparsefit(a) => sparsefit(a),
        Command::PhaseDiagram(a) => phase_diagram(a),
        Command::Study(a) => study(a),
        Command::Crossval(a) => crossval(a),
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// status: 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = pool::build().context("building the worker pool").and_then(|p| p.install(|| dispatch(&cli)));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
