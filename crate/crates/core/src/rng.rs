//! Reproducible, thread-count independent random streams.
//!
//! A run is identified by a master seed. The record index space is cut into
//! fixed chunks of [`CHUNK_LEN`] records; chunk `k` draws from a ChaCha8
//! generator keyed by the master seed on stream `k`. Any partition of the
//! chunks across workers therefore yields the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK_LEN: usize = 8192;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Derives an independent master seed for a named sub-run (e.g. a vacuum
/// calibration run next to the main run).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates `count` items starting at the chunk-aligned index `start`,
/// fanning chunks out over the current rayon pool. `draw` receives the
/// chunk generator and the global index of the item.
pub(crate) fn generate<T, F>(seed: u64, start: usize, count: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    debug_assert_eq!(start % CHUNK_LEN, 0, "generation must start on a chunk boundary");
    let end = start + count;
    let first = start / CHUNK_LEN;
    let last = end.div_ceil(CHUNK_LEN);
    let chunks: Vec<Vec<T>> = (first..last)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k as u64);
            let lo = k * CHUNK_LEN;
            let hi = (lo + CHUNK_LEN).min(end);
            (lo..hi).map(|i| draw(&mut rng, i)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
