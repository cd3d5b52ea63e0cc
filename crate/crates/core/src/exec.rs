//! Execution strategy for the data-parallel sweeps (state enumeration,
//! attribute-subset checks, conditioning-assignment loops).
//!
//! With the `parallel` feature the sweeps run on the rayon pool; without it
//! every strategy falls back to a plain sequential loop. Results are
//! bit-identical across strategies: sums are taken over fixed-size chunks
//! and the chunk totals are combined in index order.

/// Number of indices summed sequentially inside one chunk.
const CHUNK: u64 = 1 << 12;

/// Searches shorter than this run inline; the pool hand-off costs more than
/// the work.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_SEARCH: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, sequential otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether this strategy actually dispatches to a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

fn chunk_sum<F: Fn(u64) -> f64>(c: u64, n: u64, f: &F) -> f64 {
    let lo = c * CHUNK;
    let hi = (lo + CHUNK).min(n);
    (lo..hi).map(f).sum()
}

/// `Σ_{i < n} f(i)`, summed in deterministic chunk order.
pub(crate) fn sum_indices<F>(mode: Execution, n: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    #[cfg(feature = "parallel")]
    if mode.is_parallel() && chunks > 1 {
        use rayon::prelude::*;
        let partial: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| chunk_sum(c, n, &f))
            .collect();
        return partial.into_iter().sum();
    }
    let _ = mode;
    (0..chunks).map(|c| chunk_sum(c, n, &f)).sum()
}

/// First `i < n` (in index order) for which `f` yields a value.
pub(crate) fn find_first<T, F>(mode: Execution, n: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() && n >= MIN_PARALLEL_SEARCH {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(&f).find_first(|r| r.is_some()).flatten();
    }
    let _ = mode;
    (0..n).find_map(f)
}

pub(crate) fn join<A, B, RA, RB>(mode: Execution, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return rayon::join(a, b);
    }
    let _ = mode;
    (a(), b())
}
