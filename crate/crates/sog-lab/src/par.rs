//! Replication loops, parallel when the `parallel` feature is on.
//!
//! Results are collected in replication order, so reductions over the returned
//! vector are independent of the number of worker threads. All randomness is
//! keyed by replication index, never by draw order.

/// Run `f(0..reps)` and collect in index order using the crate's default
/// execution mode (rayon when the `parallel` feature is enabled).
#[cfg(feature = "parallel")]
pub fn run_replications<T, F>(reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..reps).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_replications<T, F>(reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    run_replications_seq(reps, f)
}

/// Always-sequential variant, kept for benchmarking against the parallel path.
pub fn run_replications_seq<T, F>(reps: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..reps).map(f).collect()
}
