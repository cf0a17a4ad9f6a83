//! Seeded random streams. Every chain gets its own ChaCha8 stream so results
//! are reproducible regardless of how chains are scheduled.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type ChainRng = ChaCha8Rng;

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3)";

pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..n` without modulo bias.
pub fn below<R: RngCore>(rng: &mut R, n: u32) -> u32 {
    debug_assert!(n > 0);
    let zone = u32::MAX - (u32::MAX - n + 1) % n;
    loop {
        let v = rng.next_u32();
        if v <= zone {
            return v % n;
        }
    }
}

pub fn bernoulli<R: RngCore>(rng: &mut R, p: f64) -> bool {
    uniform(rng) < p
}
