//! Execution kernels for the data-parallel inner loops (closure rounds,
//! exhaustive axiom sweeps, trial batches, candidate-basis enumeration).
//!
//! With the default `parallel` feature these run on rayon; without it they
//! fall back to plain sequential iteration. The `*_seq` variants are always
//! sequential and exist so the bench suite can compare both paths in one
//! build. All kernels preserve input order, so results are deterministic
//! either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_collect<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn map_collect_seq<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}

/// Map over an index range.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn map_range_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Short-circuiting universal quantifier over an index range.
pub fn all_range<F>(n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).all(pred)
    }
}

pub fn all_range_seq<F>(n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool,
{
    (0..n).all(pred)
}

/// First counterexample (smallest index) failing `pred`, if any. The
/// parallel path uses `find_first` so the reported witness is stable.
pub fn find_violation<F>(n: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_first(|&i| !pred(i))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find(|&i| !pred(i))
    }
}
