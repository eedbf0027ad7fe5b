//! Thread-pool control.  `IBM_THREADS` caps parallelism; all parallel loops
//! write disjoint output slots so results are identical for any thread count.

use std::sync::OnceLock;

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

/// Number of threads requested via `IBM_THREADS` (defaults to 1).
pub fn requested_threads() -> usize {
    std::env::var("IBM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(requested_threads())
            .build()
            .expect("thread pool")
    })
}

/// Run `f(i)` for every i in 0..n, filling the returned vector in index
/// order.  Each slot is computed independently, so the output does not
/// depend on the thread count.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if requested_threads() == 1 || n < 2 {
        return (0..n).map(f).collect();
    }
    pool().install(|| {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(|i| f(i)).collect()
    })
}
