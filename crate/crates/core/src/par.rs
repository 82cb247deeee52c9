//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper produces the same result under both strategies: searches
//! return the first match in index order and reductions are order-independent.
//! Without the `parallel` feature, [`Strategy::Parallel`] runs sequentially.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// First `Some` produced over `range`, in index order.
pub fn find_map_first<T, F>(strategy: Strategy, range: Range<u64>, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => range.into_par_iter().find_map_first(f),
        _ => range.into_iter().find_map(f),
    }
}

/// Number of indices in `range` satisfying `pred`.
pub fn count<F>(strategy: Strategy, range: Range<u64>, pred: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => range.into_par_iter().filter(|&i| pred(i)).count() as u64,
        _ => range.into_iter().filter(|&i| pred(i)).count() as u64,
    }
}

/// Minimum of `f` over `range`, or `None` for an empty range.
pub fn min_by_key<F>(strategy: Strategy, range: Range<u64>, f: F) -> Option<u64>
where
    F: Fn(u64) -> Option<u64> + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => range.into_par_iter().filter_map(f).min(),
        _ => range.into_iter().filter_map(f).min(),
    }
}

/// Maps `items` in order.
pub fn map<I, T, F>(strategy: Strategy, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}
