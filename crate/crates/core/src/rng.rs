//! Seeding conventions shared by every sampler.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws per parallel chunk. Chunk `k` of a run with seed `s` uses seed `s + k`,
/// so output depends only on `(seed, count)`, never on thread count.
pub const CHUNK: usize = 4096;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn chunk_rng(seed: u64, chunk: usize) -> SeededRng {
    seeded(seed.wrapping_add(chunk as u64))
}

/// Splits `count` draws into `(chunk_index, len)` pieces.
pub fn chunks(count: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..count.div_ceil(CHUNK)).map(move |k| (k, CHUNK.min(count - k * CHUNK)))
}
