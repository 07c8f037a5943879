//! Seed fan-out: every component draws from its own stream derived from the
//! master seed and a component tag, so adding a consumer never perturbs the
//! others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// `(master, tag) -> seed`: the first eight bytes (little endian) of
/// SHA-256 over `master.to_le_bytes() || tag`.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_for(master: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tag))
}

/// Stream position of a generator as seven words (seed, stream, word
/// position) so it can be stored and resumed.
pub fn rng_state(rng: &ChaCha8Rng) -> Vec<u64> {
    let seed = rng.get_seed();
    let mut out: Vec<u64> = seed
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    out.push(rng.get_stream());
    let pos = rng.get_word_pos();
    out.push(pos as u64);
    out.push((pos >> 64) as u64);
    out
}

pub fn rng_from_state(words: &[u64]) -> Option<ChaCha8Rng> {
    if words.len() != 7 {
        return None;
    }
    let mut seed = [0u8; 32];
    for (k, w) in words[..4].iter().enumerate() {
        seed[8 * k..8 * k + 8].copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(words[4]);
    rng.set_word_pos(u128::from(words[5]) | (u128::from(words[6]) << 64));
    Some(rng)
}
