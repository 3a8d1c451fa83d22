//! Seed derivation. Every stochastic step owns a ChaCha stream derived from a
//! master seed, so partial and parallel runs reproduce serial ones exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// Fixed stream ids for the stages of a benchmark realization.
pub mod stream {
    pub const DEGREES: u64 = 1;
    pub const SIZES: u64 = 2;
    pub const WIRING: u64 = 3;
    pub const FEATURES: u64 = 4;
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn sub_rng(seed: u64, stream: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Hashes an ordered list of key parts into a 64-bit seed.
///
/// Parts are joined with `|`; floats should be passed through `{:?}` so that
/// e.g. `0.1` and `0.10000000000000002` stay distinct.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            hasher.update(b"|");
        }
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
