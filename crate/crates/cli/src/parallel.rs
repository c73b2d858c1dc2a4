//! Worker-pool plumbing. `FRFX_THREADS` caps the pool size; results never
//! depend on it.

use frfx_core::{ForestConfig, ForestPlan, FunctionalRandomForest, Matrix};
use rayon::prelude::*;

use crate::error::{IoError, Result};

pub const THREADS_ENV: &str = "FRFX_THREADS";

fn requested_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(IoError::InvalidSpec(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
    }
}

/// Runs `f` inside a pool sized by `FRFX_THREADS`, or on the global pool.
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match requested_threads()? {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| IoError::InvalidSpec(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Grows trees concurrently; every tree owns its random stream, so the
/// forest equals [`frfx_core::fit_forest`] for any thread count.
pub fn fit_forest_parallel(
    scores: &Matrix,
    labels: &[u8],
    config: &ForestConfig,
) -> Result<FunctionalRandomForest> {
    let plan = ForestPlan::new(scores, labels, config)?;
    let members = (0..plan.n_trees())
        .into_par_iter()
        .map(|i| plan.grow(i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(plan.assemble(members)?)
}
