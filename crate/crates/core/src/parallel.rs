//! Replication-indexed map over a worker pool.
//!
//! With the `parallel` feature the work runs on rayon; without it every
//! execution mode falls back to a plain sequential loop. Results are always
//! returned in index order, so reductions never depend on scheduling.

/// How replications are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool; `workers = None` uses the global pool.
    #[default]
    Parallel,
    Workers(usize),
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 {
            Execution::Sequential
        } else {
            Execution::Workers(workers)
        }
    }
}

/// Evaluates `f(0), …, f(n-1)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Execution::Workers(workers) => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel | Execution::Workers(_) => (0..n).map(f).collect(),
    }
}
