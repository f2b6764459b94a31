//! Seed plumbing. Every random choice in the pipeline draws from a ChaCha
//! stream keyed by an explicit 64-bit seed and a purpose tag.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep the key, the ciphertext order, the knowledge split and
/// the sampler independent even when they share a user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Sample = 1,
    Key = 2,
    CipherOrder = 3,
    Knowledge = 4,
    LeafPermutation = 5,
    Target = 6,
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, stream: Stream) -> u64 {
    mix(seed ^ mix(stream as u64))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    rng(derive(seed, stream))
}
