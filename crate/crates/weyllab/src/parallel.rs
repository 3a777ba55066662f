//! Parallel drivers that reproduce the sequential reduction order.
//!
//! [`pairwise`] walks the same binary tree as the core's sequential
//! pairwise sum and hands subtrees to `rayon::join`, so every result is
//! bit-identical to the single-threaded one regardless of pool size.

use std::ops::Add;

use num_traits::Zero;
use rayon::prelude::*;
use weyllab_core::spectra::TorusSummands;
use weyllab_core::summation::{pairwise_range, split_point};
use weyllab_core::{Complex64, KernelRequest, SpectralBand};

use crate::error::{CliError, CliResult};

/// Subtrees at most this long are reduced on one thread.
pub const GRAIN: usize = 1 << 14;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "WEYLLAB_THREADS";

/// Pairwise sum of `term(i)` over `[lo, hi)`, identical to the sequential tree.
pub fn pairwise<T, F>(lo: usize, hi: usize, term: &F) -> T
where
    T: Copy + Add<Output = T> + Zero + Send,
    F: Fn(usize) -> T + Sync,
{
    if hi <= lo || hi - lo <= GRAIN {
        return pairwise_range(lo, hi, term);
    }
    let mid = split_point(lo, hi);
    let (a, b) = rayon::join(|| pairwise(lo, mid, term), || pairwise(mid, hi, term));
    a + b
}

/// [`weyllab_core::torus_kernel`] with the reduction spread over the pool.
pub fn torus_kernel(req: &KernelRequest, band: &SpectralBand) -> weyllab_core::Result<Complex64> {
    let summands = TorusSummands::new(req, band)?;
    let sum = pairwise(0, summands.len(), &|i| summands.term(i));
    Ok(summands.finish(sum))
}

/// Ordered parallel map with early error propagation.
pub fn try_map<I, O, E, F>(items: &[I], f: F) -> Result<Vec<O>, E>
where
    I: Sync,
    O: Send,
    E: Send,
    F: Fn(&I) -> Result<O, E> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Thread count from the flag, then the environment; `None` leaves rayon's default.
pub fn resolve_threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::invalid("threads", format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

/// Runs `f` inside a pool of `threads` workers (rayon's default when `None`).
pub fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> CliResult<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::invalid("threads", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::invalid("threads", e.to_string()))?;
    Ok(pool.install(f))
}
