//! Switch between rayon and sequential iteration.
//!
//! Every data-parallel loop in the crate goes through these helpers, so the
//! `parallel` feature flips all of them at once. Output order always follows
//! input order, which keeps parallel and serial runs bit-identical.

/// Map `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Map `f` over `0..n`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Whether this build fans work out to a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Size the global worker pool. Has no effect in sequential builds; fails if
/// the pool was already started.
#[cfg(feature = "parallel")]
pub fn set_workers(n: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn set_workers(_n: usize) -> Result<(), String> {
    Ok(())
}
