//! Indexed map-collect over a work range.
//!
//! Results come back in index order regardless of scheduling, so callers
//! can fold them sequentially and get answers that do not depend on the
//! thread count. With the `parallel` feature disabled the same entry
//! point degrades to a plain loop.

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    map_collect_seq(n, f)
}

/// Reference path: always a sequential loop, whatever the feature set.
pub(crate) fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let par = map_collect(1000, |i| i * i);
        let seq = map_collect_seq(1000, |i| i * i);
        assert_eq!(par, seq);
    }
}
