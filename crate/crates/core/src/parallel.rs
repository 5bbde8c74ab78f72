//! Work distribution for Monte Carlo loops.
//!
//! Samples are mapped by index and collected in index order, so every
//! reduction downstream sees the same operand order whatever the worker
//! count. With the `parallel` feature disabled every policy runs
//! sequentially.

use crate::error::{Error, Result};

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Executor {
    Sequential,
    /// Rayon pool with the given number of threads; `0` uses the global pool.
    #[default]
    Parallel,
    Workers(usize),
}

impl Executor {
    /// `1` worker means sequential, `0` the default global pool.
    pub fn with_workers(workers: usize) -> Self {
        match workers {
            0 => Executor::Parallel,
            1 => Executor::Sequential,
            w => Executor::Workers(w),
        }
    }

    /// Applies `f` to `0..n` and returns the results in index order.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Executor::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Executor::Parallel => par_collect(n, &f),
            #[cfg(feature = "parallel")]
            Executor::Workers(w) => match rayon::ThreadPoolBuilder::new().num_threads(*w).build() {
                Ok(pool) => pool.install(|| par_collect(n, &f)),
                Err(_) => (0..n).map(f).collect(),
            },
            #[cfg(not(feature = "parallel"))]
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Executor::map`] for fallible items. The reported error is the
    /// one with the lowest index, independent of scheduling.
    pub fn try_map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.map(n, f).into_iter().collect::<Result<Vec<T>, Error>>()
    }
}

#[cfg(feature = "parallel")]
fn par_collect<T, F>(n: usize, f: &F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}
