//! Ordered data-parallel map over work-item indices.
//!
//! With the `parallel` feature (on by default) items run on a rayon pool;
//! without it everything runs on the calling thread. Results always come back
//! in index order, so reductions over them do not depend on the thread count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "RINGQEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    /// A pool of this many workers; 0 means one per available core.
    Threads(usize),
    /// [`THREADS_ENV`] if set, otherwise one worker per core.
    #[default]
    Auto,
}

impl Parallelism {
    pub fn from_count(threads: usize) -> Self {
        if threads == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(threads)
        }
    }

    /// Resolve [`Parallelism::Auto`] against the environment.
    pub fn resolve(self) -> Result<Self> {
        match self {
            Parallelism::Auto => match std::env::var(THREADS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse::<usize>()
                    .map(Parallelism::from_count)
                    .map_err(|_| Error::Config(format!("{THREADS_ENV}={v:?} is not a thread count"))),
                Err(_) => Ok(Parallelism::Threads(0)),
            },
            other => Ok(other),
        }
    }
}

/// `(0..n).map(f)` with results in index order.
pub fn map_indexed<T, F>(parallelism: Parallelism, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match parallelism.resolve()? {
        Parallelism::Sequential => Ok((0..n).map(f).collect()),
        Parallelism::Threads(threads) => pooled(threads, n, f),
        Parallelism::Auto => unreachable!("resolved above"),
    }
}

#[cfg(feature = "parallel")]
fn pooled<T, F>(threads: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn pooled<T, F>(_threads: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    log::debug!("built without the `parallel` feature; running sequentially");
    Ok((0..n).map(f).collect())
}
