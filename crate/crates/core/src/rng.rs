//! Counter-style splittable random streams.
//!
//! Every Monte Carlo trial owns a stream identified by `(master_seed, stream_id)`.
//! Child streams are derived by hashing, so a trial's randomness depends only on
//! its position in the stream tree and never on the parallel schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator handed out by [`RngSpec::rng`].
pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Address of one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64) -> Self {
        RngSpec {
            master_seed,
            stream_id: 0,
        }
    }

    pub fn with_stream(master_seed: u64, stream_id: u64) -> Self {
        RngSpec {
            master_seed,
            stream_id,
        }
    }

    /// Child stream `index` of this stream. Distinct indices give distinct,
    /// statistically independent children; the same index always gives the
    /// same child.
    pub fn substream(&self, index: u64) -> Self {
        let mixed = splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)));
        RngSpec {
            master_seed: self.master_seed,
            stream_id: splitmix64(mixed.rotate_left(17) ^ index),
        }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> StreamRng {
        let mut key = [0u8; 32];
        let mut state = splitmix64(self.master_seed) ^ self.stream_id.rotate_left(32);
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state ^ self.stream_id);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}
