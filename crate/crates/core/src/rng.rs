//! Seeded random streams.
//!
//! Every stochastic component draws from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! whose output is specified bit-for-bit and therefore identical on every
//! platform. A stream is keyed by a root seed plus a purpose label and a list
//! of integer coordinates; the 32-byte ChaCha key is the SHA-256 digest of
//! that key. Distinct purposes never share a stream, so adding a draw in one
//! component cannot perturb another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

const DOMAIN: &[u8] = b"annealdiag/stream/v1";

fn digest(seed: u64, purpose: &str, coords: &[u64]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN);
    hasher.update(seed.to_le_bytes());
    hasher.update((purpose.len() as u64).to_le_bytes());
    hasher.update(purpose.as_bytes());
    for c in coords {
        hasher.update(c.to_le_bytes());
    }
    hasher.finalize().into()
}

/// Independent generator for `(seed, purpose, coords)`.
pub fn stream(seed: u64, purpose: &str, coords: &[u64]) -> StreamRng {
    ChaCha8Rng::from_seed(digest(seed, purpose, coords))
}

/// Derived 64-bit seed, for handing a sub-component its own root seed.
pub fn derive_seed(seed: u64, purpose: &str, coords: &[u64]) -> u64 {
    let d = digest(seed, purpose, coords);
    u64::from_le_bytes(d[..8].try_into().expect("digest is 32 bytes"))
}

/// Stable 64-bit hash of a string label (used to fold names into coordinates).
pub fn label_hash(label: &str) -> u64 {
    derive_seed(0, label, &[])
}
