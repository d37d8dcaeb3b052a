//! Chunked ensemble execution.
//!
//! Work is split into fixed-size chunks, each with its own ChaCha stream
//! derived from `(seed, chunk index)`, and results are returned in chunk
//! order. Outputs therefore do not depend on the number of worker threads or
//! on whether the `parallel` feature is enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// How ensemble chunks are scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    /// Rayon's global pool when the `parallel` feature is on, otherwise sequential.
    #[default]
    Auto,
    Sequential,
}

impl Execution {
    /// `[f(0), f(1), ..., f(n - 1)]`
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Auto => map_auto(n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn map_auto<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_auto<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Worker threads available to [`Execution::Auto`].
pub fn worker_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Size the global pool used by [`Execution::Auto`]. Only the first call
/// has an effect; without the `parallel` feature this is a no-op.
pub fn configure_threads(n: usize) -> crate::Result<()> {
    if n == 0 {
        return Err(crate::IbtError::invalid("threads", "must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Independent generator for one chunk of an ensemble.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Split `n` items into chunks of at most `size`; returns `(start, len)` pairs.
pub fn chunks(n: usize, size: usize) -> Vec<(usize, usize)> {
    let size = size.max(1);
    (0..n.div_ceil(size))
        .map(|c| {
            let start = c * size;
            (start, size.min(n - start))
        })
        .collect()
}
