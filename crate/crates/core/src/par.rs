//! Data-parallel helpers shared by the enumeration loops.
//!
//! With the `parallel` feature the block loops run on rayon; without it, or
//! after [`set_mode`] selects [`ExecMode::Sequential`], they run in order on
//! the calling thread. Every helper returns per-block results in block order,
//! so floating-point reductions combine in the same order on either path.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

static MODE: AtomicU8 = AtomicU8::new(1);

pub fn set_mode(mode: ExecMode) {
    MODE.store(
        match mode {
            ExecMode::Sequential => 0,
            ExecMode::Parallel => 1,
        },
        Ordering::Relaxed,
    );
}

/// The mode loops will actually run in.
pub fn mode() -> ExecMode {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 1 {
        ExecMode::Parallel
    } else {
        ExecMode::Sequential
    }
}

/// Caps the global worker count. Only the first call has an effect; returns
/// false when the pool was already initialised or the feature is off.
pub fn set_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

fn blocks(n: usize, block: usize) -> Vec<Range<usize>> {
    let block = block.max(1);
    (0..n.div_ceil(block))
        .map(|i| i * block..((i + 1) * block).min(n))
        .collect()
}

/// Splits `0..n` into fixed-size blocks and maps each one, returning the
/// results in block order.
pub fn map_blocks<R, F>(n: usize, block: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let ranges = blocks(n, block);
    match mode() {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            ranges.into_par_iter().map(f).collect()
        }
        _ => ranges.into_iter().map(f).collect(),
    }
}

/// Maps each block and folds the block results left to right.
pub fn map_reduce<R, F, G>(n: usize, block: usize, identity: R, f: F, combine: G) -> R
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
    G: Fn(R, R) -> R,
{
    map_blocks(n, block, f).into_iter().fold(identity, combine)
}

/// Block size that gives a few blocks per worker without going below `min`.
pub fn block_size(n: usize, min: usize) -> usize {
    (n / 64).max(min).max(1)
}

/// Fixed-size bitset that concurrent blocks can set without locking; the
/// final contents do not depend on scheduling.
pub struct AtomicBitset {
    words: Vec<AtomicU64>,
    len: usize,
}

impl AtomicBitset {
    pub fn new(len: usize) -> Self {
        AtomicBitset {
            words: (0..len.div_ceil(64)).map(|_| AtomicU64::new(0)).collect(),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn set(&self, i: usize) {
        self.words[i / 64].fetch_or(1 << (i % 64), Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64].load(Ordering::Relaxed) >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words
            .iter()
            .map(|w| w.load(Ordering::Relaxed).count_ones() as u64)
            .sum()
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (k, w) in self.words.iter().enumerate() {
            let mut w = w.load(Ordering::Relaxed);
            while w != 0 {
                out.push(k as u64 * 64 + w.trailing_zeros() as u64);
                w &= w - 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_range_in_order() {
        let got = map_blocks(10, 3, |r| r);
        assert_eq!(got, vec![0..3, 3..6, 6..9, 9..10]);
        assert!(map_blocks(0, 4, |r| r.len()).is_empty());
    }

    #[test]
    fn reduce_matches_sequential_sum() {
        let total = map_reduce(1000, 7, 0u64, |r| r.map(|i| i as u64).sum(), |a, b| a + b);
        assert_eq!(total, 999 * 1000 / 2);
    }

    #[test]
    fn bitset_from_blocks() {
        let bits = AtomicBitset::new(200);
        map_blocks(200, 9, |r| r.filter(|i| i % 3 == 0).for_each(|i| bits.set(i)));
        assert_eq!(bits.count_ones(), 67);
        assert!(bits.get(198) && !bits.get(199));
        assert_eq!(bits.ones()[..3], [0, 3, 6]);
    }
}
