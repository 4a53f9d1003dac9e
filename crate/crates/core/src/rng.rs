//! Seed derivation.
//!
//! Every random draw in a run comes from a stream keyed by the master seed,
//! a purpose tag and an index (user id, sweep cell, ...). Sessions therefore
//! never share a generator, and the order in which they are executed cannot
//! change what any of them observes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Corpus,
    UserInit,
    Agent,
    Environment,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Corpus => 0x636f_7270_7573,
            Stream::UserInit => 0x7573_6572,
            Stream::Agent => 0x0061_6765_6e74,
            Stream::Environment => 0x0065_6e76,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `master`, order-sensitively.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(master), |acc, &part| mix64(acc ^ mix64(part)))
}

pub fn stream_rng(master: u64, stream: Stream, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(derive_seed(master, &[stream.tag()]));
    rng.set_stream(index);
    rng
}
