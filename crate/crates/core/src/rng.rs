//! Counter-based RNG streams.
//!
//! Every random quantity is drawn from a ChaCha20 generator keyed by the
//! master seed and positioned on a 64-bit stream id, so a path's samples do
//! not depend on which thread produced it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha20Rng;

/// Purpose tags occupy the top 16 bits of a stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u16)]
pub enum Purpose {
    Path = 0,
    Calibration = 1,
    CrossCheck = 2,
    Sweep = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StreamId(pub u64);

impl StreamId {
    pub fn new(purpose: Purpose, index: u64) -> Self {
        assert!(index < 1 << 48, "stream index {index} too large");
        StreamId(((purpose as u64) << 48) | index)
    }

    pub fn path(index: u64) -> Self {
        Self::new(Purpose::Path, index)
    }
}

pub fn stream_rng(master_seed: u64, stream: StreamId) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream.0);
    rng
}
