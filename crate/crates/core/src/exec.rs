//! Execution strategy for the data-parallel inner loops.
//!
//! Both strategies produce bit-identical results: elementwise updates are
//! order-independent, and reductions always sum fixed-size chunks first and
//! then fold the chunk totals left to right.

use std::ops::Add;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Elements per reduction chunk. Fixed so results never depend on the
/// number of worker threads.
pub const REDUCE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Self::Parallel
        } else {
            Self::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Self::Parallel
    }

    pub fn for_each_mut<T, F>(self, data: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
            return;
        }
        data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }

    pub fn map_indices<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Chunked sum of `f(x)` over `data`.
    pub fn sum<T, S, F>(self, data: &[T], zero: S, f: F) -> S
    where
        T: Sync,
        S: Copy + Send + Sync + Add<Output = S>,
        F: Fn(&T) -> S + Sync + Send,
    {
        let chunk_sum = |chunk: &[T]| chunk.iter().fold(zero, |acc, x| acc + f(x));
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            let partials: Vec<S> = data.par_chunks(REDUCE_CHUNK).map(chunk_sum).collect();
            return partials.into_iter().fold(zero, |acc, x| acc + x);
        }
        data.chunks(REDUCE_CHUNK)
            .map(chunk_sum)
            .fold(zero, |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_sum_identically() {
        let data: Vec<f64> = (0..100_003).map(|i| (i as f64).sin() * 1e-3).collect();
        let a = Execution::Sequential.sum(&data, 0.0, |x| *x);
        let b = Execution::Parallel.sum(&data, 0.0, |x| *x);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn map_and_update_agree() {
        let seq = Execution::Sequential.map_indices(1000, |i| i * 3);
        let par = Execution::Parallel.map_indices(1000, |i| i * 3);
        assert_eq!(seq, par);
        let mut v = vec![1u32; 50];
        Execution::Parallel.for_each_mut(&mut v, |i, x| *x += i as u32);
        assert_eq!(v[49], 50);
    }
}
