//! Worker-pool handle passed into every parallel operation.
//!
//! Library code never spawns threads of its own: callers build a
//! [`Parallelism`] (the CLI owns the only one) and every parallel routine runs
//! inside it. All reductions downstream are performed in index order, so
//! results do not depend on the worker count.

use std::sync::Arc;

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Parallelism {
    pool: Arc<ThreadPool>,
}

impl Parallelism {
    /// Pool with an explicit worker count (`0` means rayon's default).
    pub fn with_workers(workers: usize) -> Result<Self> {
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
        Ok(Self {
            pool: Arc::new(pool),
        })
    }

    pub fn sequential() -> Self {
        Self::with_workers(1).expect("single-thread pool")
    }

    pub fn auto() -> Self {
        Self::with_workers(0).expect("default pool")
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R, F>(&self, f: F) -> R
    where
        F: FnOnce() -> R + Send,
        R: Send,
    {
        self.pool.install(f)
    }
}

impl std::fmt::Debug for Parallelism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Parallelism")
            .field("workers", &self.workers())
            .finish()
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        Self::auto()
    }
}
