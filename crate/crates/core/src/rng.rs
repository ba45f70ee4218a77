//! Counter-based randomness.
//!
//! Every coin an algorithm flips is a pure function of `(seed, counter)`, so a
//! replay of the same update sequence under the same seed reproduces the same
//! decisions, and the coin at round `t` cannot depend on anything the
//! adversary submitted.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a counter (and a domain tag) into a fresh 64-bit word.
pub fn derive_seed(seed: u64, domain: u64, counter: u64) -> u64 {
    let a = splitmix64(seed ^ domain.wrapping_mul(GOLDEN));
    splitmix64(a ^ splitmix64(counter.wrapping_add(domain)))
}

/// Deterministic uniform draws indexed by a round counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
    domain: u64,
}

impl CounterRng {
    pub fn new(seed: u64, domain: u64) -> Self {
        Self { seed, domain }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&self, counter: u64) -> f64 {
        let bits = derive_seed(self.seed, self.domain, counter) >> 11;
        bits as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A full stream generator for rounds that need many draws.
    pub fn stream(&self, counter: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_seed(self.seed, self.domain ^ 0xA5A5, counter))
    }
}

/// Domain tags keep the coins of different consumers independent.
pub mod domain {
    pub const ROW_SAMPLER: u64 = 1;
    pub const CORESET: u64 = 2;
    pub const SPARSIFIER: u64 = 3;
    pub const ADVERSARY: u64 = 4;
    pub const GENERATOR: u64 = 5;
    pub const SKETCH: u64 = 6;
}
