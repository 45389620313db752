//! Deterministic parallel execution.
//!
//! Work is cut into fixed-size chunks of path indices. Chunk boundaries do
//! not depend on the worker count and results come back in chunk order, so
//! any reduction done afterwards sees the same operands in the same order
//! whether one thread or many ran the chunks.

use std::ops::Range;

use rayon::prelude::*;

use crate::{Error, Result};

/// Paths per work item.
pub const CHUNK: u64 = 256;

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(Self { pool, workers })
    }

    pub fn serial() -> Self {
        Self::new(1).expect("a one-thread pool always builds")
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// `f` over consecutive index ranges of length [`CHUNK`] covering
    /// `0..total`, in order.
    pub fn map_chunks<T, F>(&self, total: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync + Send,
    {
        let chunks = total.div_ceil(CHUNK);
        self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(total)))
                .collect()
        })
    }

    /// `f(i)` for every `i < total`, in index order.
    pub fn map<T, F>(&self, total: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.map_chunks(total, |r| r.map(&f).collect::<Vec<T>>())
            .into_iter()
            .flatten()
            .collect()
    }

    /// Number of `i < total` with `pred(i)`.
    pub fn count<F>(&self, total: u64, pred: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        self.map_chunks(total, |r| r.filter(|&i| pred(i)).count() as u64)
            .into_iter()
            .sum()
    }

    /// Like `map` but `f` may fail; the first error in index order wins.
    pub fn try_map<T, F>(&self, total: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        self.map(total, f).into_iter().collect()
    }
}
