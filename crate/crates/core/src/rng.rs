//! Seeding for reproducible replicas.
//!
//! Every sampler draws from ChaCha8, a counter-based generator. Replica `i` of
//! a run with master seed `s` uses the stream seeded with `s ^ i`, so results
//! do not depend on how replicas are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`, for
/// components of one replica (left tree, right tree, ray choices, ...).
pub fn stream_rng(seed: u64, stream: u64) -> LabRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn replica_seed(master: u64, replica: u64) -> u64 {
    master ^ replica
}

pub fn replica_rng(master: u64, replica: u64) -> LabRng {
    rng_from_seed(replica_seed(master, replica))
}
