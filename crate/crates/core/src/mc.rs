//! Chunked, seed-reproducible Monte Carlo plumbing.
//!
//! Work is cut into chunks of [`CHUNK`] draws. Chunk `j` of a run seeded with
//! `seed` uses ChaCha8 seeded from `seed` on stream `j`, so the merged result
//! depends only on `(seed, n)` and never on the thread count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: u64 = 1 << 16;

/// Generator for chunk `index` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives an independent sub-seed (splitmix64 finalizer over `seed` and `tag`).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_lengths(n: u64) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let chunks = n.div_ceil(CHUNK) as usize;
    (0..chunks).into_par_iter().map(move |j| {
        let j = j as u64;
        let len = CHUNK.min(n - j * CHUNK) as usize;
        (j, len)
    })
}

/// Runs `f(rng, len)` on every chunk and returns the results in chunk order.
pub fn map_chunks<T, F>(n: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    chunk_lengths(n)
        .map(|(j, len)| f(&mut chunk_rng(seed, j), len))
        .collect()
}

/// Counts the draws for which `hit` returns true.
///
/// `init` builds per-chunk scratch state (buffers) handed to every call.
pub fn count_hits<S, I, F>(n: u64, seed: u64, init: I, hit: F) -> u64
where
    I: Fn() -> S + Sync,
    F: Fn(&mut ChaCha8Rng, &mut S) -> bool + Sync,
{
    chunk_lengths(n)
        .map(|(j, len)| {
            let mut rng = chunk_rng(seed, j);
            let mut state = init();
            (0..len).filter(|_| hit(&mut rng, &mut state)).count() as u64
        })
        .sum()
}

/// Binomial proportion summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub p_hat: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl Proportion {
    /// Normal 95% interval, or the Wilson interval when fewer than 50 hits are expected.
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let nf = n as f64;
        let p = hits as f64 / nf;
        let stderr = (p * (1.0 - p) / nf).sqrt();
        let ci95 = if p * nf < 50.0 {
            wilson(p, nf, 1.96)
        } else {
            ((p - 1.96 * stderr).max(0.0), (p + 1.96 * stderr).min(1.0))
        };
        Proportion {
            p_hat: p,
            stderr,
            ci95,
        }
    }
}

pub fn wilson(p: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
