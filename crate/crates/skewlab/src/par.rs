//! Data-parallel map over independent tasks, with a sequential build behind
//! the `parallel` feature for single-threaded baselines. Both paths return
//! results in task order, so downstream output is identical either way.

#[cfg(feature = "parallel")]
pub fn map_tasks<T, R, F>(tasks: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    tasks.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_tasks<T, R, F>(tasks: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    tasks.into_iter().map(f).collect()
}

/// Always-sequential variant, kept available for timing comparisons even
/// when the parallel feature is on.
pub fn map_tasks_seq<T, R, F>(tasks: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    tasks.into_iter().map(f).collect()
}
