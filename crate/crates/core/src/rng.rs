//! Named random streams derived from one master seed.
//!
//! Each stage draws from its own generator, seeded by hashing the master
//! seed with the stage name and trial index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Split,
    Negatives,
    Init,
    Shuffle,
    Generate,
}

impl Stream {
    pub fn name(self) -> &'static str {
        match self {
            Stream::Split => "split",
            Stream::Negatives => "negatives",
            Stream::Init => "init",
            Stream::Shuffle => "shuffle",
            Stream::Generate => "generate",
        }
    }
}

pub fn stream_seed(seed: u64, stream: Stream, trial: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stream.name().as_bytes());
    h.update(trial.to_le_bytes());
    h.finalize().into()
}

pub fn stream_rng(seed: u64, stream: Stream, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_seed(seed, stream, trial))
}
