//! Execution policy for the data-parallel loops (grid searches, scans, sweeps).
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] runs on the
//! rayon pool; without it every policy runs sequentially. Results are always
//! returned in input order, so both policies produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Order-preserving map.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Order-preserving map over `0..n`.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maximum of `f` over `0..n`. Ties go to the smallest index, so the
    /// result does not depend on how the range was split.
    pub fn argmax_range<F>(self, n: usize, f: F) -> Option<(usize, f64)>
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let pick = |a: (usize, f64), b: (usize, f64)| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        };
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(|i| (i, f(i))).reduce_with(pick),
            _ => (0..n).map(|i| (i, f(i))).reduce(pick),
        }
    }
}

/// Cap the global worker pool. Only the first call has an effect; later calls
/// and builds without the `parallel` feature are no-ops.
pub fn init_thread_pool(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = Exec::Sequential.map(&xs, |x| x * 2.0);
        let b = Exec::Parallel.map(&xs, |x| x * 2.0);
        assert_eq!(a, b);
    }

    #[test]
    fn argmax_ties_pick_lowest_index() {
        let f = |i: usize| if i % 7 == 3 { 1.0 } else { 0.0 };
        assert_eq!(Exec::Sequential.argmax_range(100, f), Some((3, 1.0)));
        assert_eq!(Exec::Parallel.argmax_range(100, f), Some((3, 1.0)));
        assert_eq!(Exec::Parallel.argmax_range(0, f), None);
    }
}
