//! Ordered map over independent work items, parallel when the `parallel`
//! feature is enabled and sequential otherwise.
//!
//! Grid points and per-sample entanglement evaluations are independent, so
//! both paths produce bitwise-identical, input-ordered output. The
//! `LOSSY_TWINBEAM_THREADS` environment variable caps the pool size used by
//! the parallel path.

#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match thread_cap() {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("build rayon pool");
            pool.install(|| items.par_iter().map(&f).collect())
        }
        None => items.par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Always-sequential variant, kept around as the reference path for the
/// benchmark suite and determinism checks.
pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
fn thread_cap() -> Option<usize> {
    std::env::var("LOSSY_TWINBEAM_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}
