//! Seeded, splittable random streams.
//!
//! Every stochastic routine takes its randomness from a [`Stream`]. A stream is
//! a ChaCha8 generator keyed by `(seed, stream_id)`; workers use their index as
//! the stream id, so a run is reproducible for a fixed seed and worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, stream_id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Split `total` into `streams` chunks whose sizes differ by at most one.
pub fn split_budget(total: u64, streams: usize) -> Vec<u64> {
    let k = streams.max(1) as u64;
    (0..k).map(|i| total / k + u64::from(i < total % k)).collect()
}
