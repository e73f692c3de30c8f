//! Deterministic RNG streams.
//!
//! Every random choice is drawn from a ChaCha stream whose seed is a SHA-256
//! digest of the global seed and a list of labels (instance id, task name,
//! purpose). Adding or removing instances never perturbs the other streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Derives a 64-bit seed from a global seed and labels.
pub fn derive_seed(global_seed: u64, labels: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global_seed.to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn stream(global_seed: u64, labels: &[&str]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(global_seed, labels))
}

pub fn rng_from(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
