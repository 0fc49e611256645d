//! Execution mode for the data-parallel loops in this crate.
//!
//! Every batch operation (vocoder rendering, corpus scoring, pool synthesis,
//! exhaustive oracles) routes its inner loop through [`Exec`]. With the
//! `parallel` feature the default is rayon's global pool; without it, or with
//! [`Exec::Sequential`], the same closure runs on the calling thread. Results
//! are always returned in input order, so both modes produce identical output.

/// How a batch loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing. Degrades to sequential when the `parallel`
    /// feature is off.
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
    /// True when this mode actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Order-preserving map over a slice.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over an index range.
    pub fn map_range<U, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Fill `out` in fixed-size chunks; `f` receives the chunk index and the
    /// mutable chunk.
    pub fn for_each_chunk_mut<T, F>(self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            out.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        out.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }

    /// Run `f` inside a dedicated pool of `threads` workers (for `--jobs N`).
    /// `threads == 0` uses the global pool.
    pub fn with_threads<R, F>(threads: usize, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        #[cfg(feature = "parallel")]
        if threads > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                return pool.install(f);
            }
        }
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_preserve_order() {
        let items: Vec<u64> = (0..10_000).collect();
        let seq = Exec::Sequential.map(&items, |x| x * x + 1);
        let par = Exec::Parallel.map(&items, |x| x * x + 1);
        assert_eq!(seq, par);
        assert_eq!(seq[17], 17 * 17 + 1);
    }

    #[test]
    fn chunked_fill_matches() {
        let mut a = vec![0usize; 1001];
        let mut b = vec![0usize; 1001];
        Exec::Sequential.for_each_chunk_mut(&mut a, 64, |ci, c| {
            for (j, v) in c.iter_mut().enumerate() {
                *v = ci * 64 + j;
            }
        });
        Exec::Parallel.for_each_chunk_mut(&mut b, 64, |ci, c| {
            for (j, v) in c.iter_mut().enumerate() {
                *v = ci * 64 + j;
            }
        });
        assert_eq!(a, b);
        assert_eq!(a[1000], 1000);
    }
}
