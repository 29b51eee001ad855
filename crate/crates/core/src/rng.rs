//! Portable seeded randomness.
//!
//! The stream is ChaCha20 (the `rand_chacha` 20-round variant) keyed with the
//! 64-bit seed in little-endian order followed by 24 zero bytes, with a
//! zero nonce and counter. Every derived draw is defined here rather than
//! through a library distribution, so another implementation of ChaCha20 can
//! reproduce generated graphs exactly:
//!
//! * `unit`: top 53 bits of one `u64` scaled by 2^-53, giving [0, 1).
//! * `chance(p)`: `unit() < p`; always consumes one `u64`.
//! * `below(n)`: rejection sampling on whole `u64` draws; any draw at or above
//!   the largest multiple of `n` is discarded, otherwise `draw % n`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha20Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        SeededRng(ChaCha20Rng::from_seed(key))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }
}
