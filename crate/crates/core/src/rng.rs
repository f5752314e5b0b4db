//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`Rng`], a thin wrapper over
//! the ChaCha8 stream cipher PRNG (`rand_chacha::ChaCha8Rng`, seeded with
//! `SeedableRng::seed_from_u64`). The derived draws are defined here
//! explicitly so that datasets and runs can be reproduced by any
//! implementation of ChaCha8:
//!
//! * `uniform()`: `(next_u64 >> 11) * 2^-53`, a double in `[0, 1)`.
//! * `below(n)`: rejection sampling on `next_u64`, rejecting values below
//!   `2^64 mod n`, then `x % n`.
//! * `shuffle`: Fisher-Yates from the last index down, `j = below(i + 1)`.
//! * `bits(n)`: the low `n` bits of one `next_u64` (each bit a fair coin).
//!
//! Independent substreams are derived from a parent seed and a list of
//! integer tags with [`derive_seed`] (SplitMix64 mixing).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `n` independent fair bits packed little-endian, `n <= 64`.
    pub fn bits(&mut self, n: usize) -> u64 {
        debug_assert!(n <= 64);
        let x = self.next_u64();
        if n == 64 {
            x
        } else {
            x & ((1u64 << n) - 1)
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for the substream identified by `tags` under `parent`.
pub fn derive_seed(parent: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(parent), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Tags naming the substreams used by training runs.
pub(crate) mod stream {
    pub const INIT_PARAMS: u64 = 1;
    pub const SCHEDULE: u64 = 2;
    pub const PHASE: u64 = 3;
    pub const RANDOM_BAR: u64 = 4;
    pub const CHECK_SHOTS: u64 = 5;
    pub const FINAL_SHOTS: u64 = 6;
    pub const RUN: u64 = 7;
    pub const DATASET: u64 = 8;
    pub const FORGETTING: u64 = 9;
}
