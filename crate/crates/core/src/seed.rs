//! Seeds and random streams.
//!
//! Every random object in the crate is drawn from a [`ChaCha8Rng`] seeded by a
//! 64-bit [`Seed`]. Independent streams (per trial, per Monte Carlo repetition)
//! are derived by hashing the parent seed with an index through SplitMix64, so a
//! stream only depends on its coordinates and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator behind every seeded draw.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed of the `index`-th child stream.
    pub fn substream(self, index: u64) -> Seed {
        Seed(combine(self.0, index))
    }

    /// Seed of one sweep trial: `combine(combine(combine(master, n), r), trial)`.
    pub fn for_trial(master: Seed, n: u32, r: u32, trial: u64) -> Seed {
        let h = combine(master.0, u64::from(n));
        let h = combine(h, u64::from(r));
        Seed(combine(h, trial))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive mixer used for all seed derivations.
pub fn combine(acc: u64, x: u64) -> u64 {
    splitmix64(acc.rotate_left(23) ^ splitmix64(x))
}
