use anyhow::{Context, Result};
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Worker count override; unset or 0 means one worker per core.
pub const WORKERS_ENV: &str = "ROBUSTCHOICE_WORKERS";

pub fn workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{WORKERS_ENV} must be a nonnegative integer, got '{v}'")),
        Err(_) => Ok(0),
    }
}

pub fn build() -> Result<ThreadPool> {
    Ok(ThreadPoolBuilder::new().num_threads(workers()?).build()?)
}
