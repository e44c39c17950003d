use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robustchoice_core::robust::{
    robust_bruteforce, robust_censored_comparison, robust_cutting_plane, robust_ranking_exact, robust_sampled_dual,
    Method, RobustQuery, RobustResult, UniformSampler, DEFAULT_MAX_ROUNDS,
};
use robustchoice_core::{Error, Result};

/// Knobs of the iterative and randomized estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodOptions {
    pub samples: usize,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            rounds: DEFAULT_MAX_ROUNDS,
            seed: 0,
        }
    }
}

/// Runs `method` on a data-vector query. The interval method works from
/// transaction counts instead and is rejected here.
pub fn solve(q: &RobustQuery, method: Method, opts: &MethodOptions) -> Result<RobustResult> {
    match method {
        Method::Brute => robust_bruteforce(q),
        Method::Ranking => robust_ranking_exact(q),
        Method::Cut => robust_cutting_plane(q, opts.rounds),
        Method::Censored => robust_censored_comparison(q),
        Method::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            robust_sampled_dual(q, opts.samples, &UniformSampler { n: q.n() }, &mut rng)
        }
        Method::Interval => Err(Error::Unsupported(
            "the interval method takes transaction counts, not a data vector".into(),
        )),
    }
}
