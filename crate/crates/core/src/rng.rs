//! Named random streams.
//!
//! Every random quantity in the crate is drawn from a stream identified by
//! `(seed, label, index)`. The stream key is the SHA-256 digest of the seed
//! (little endian), the label bytes, a zero separator and the index (little
//! endian); the digest seeds a ChaCha8 generator. Work split across threads
//! therefore never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, label: &str, index: u64) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Derives a child seed, for handing a sub-task its own seed space.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    use rand::RngCore;
    stream(seed, label, 0).next_u64()
}
