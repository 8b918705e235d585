//! Counter-based random streams.
//!
//! Each draw site gets its own ChaCha8 stream addressed by (purpose, period)
//! and a word offset per item, so results do not depend on the order or the
//! degree of parallelism in which particles are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved per item within one stream.
const ITEM_STRIDE: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Init = 1,
    Select = 2,
    Propagate = 3,
    Resample = 4,
    Simulate = 5,
    Oracle = 6,
}

#[derive(Debug, Clone)]
pub struct RngStreams {
    base: ChaCha8Rng,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent family of streams for a sub-job (dataset, model fit, ...).
    pub fn derive(&self, tag: u64) -> Self {
        let mut key = self.base.get_seed();
        for (i, b) in tag.to_le_bytes().iter().enumerate() {
            key[24 + i] ^= b;
        }
        // Mix so that nearby tags do not share key prefixes in an obvious way.
        let mut mixer = ChaCha8Rng::from_seed(key);
        let mut seed = [0u8; 32];
        rand::RngCore::fill_bytes(&mut mixer, &mut seed);
        Self {
            base: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Stream for `item` at `period` for the given purpose.
    pub fn stream(&self, purpose: Purpose, period: u64, item: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(((purpose as u64) << 56) ^ period);
        rng.set_word_pos(u128::from(item) * ITEM_STRIDE);
        rng
    }
}
