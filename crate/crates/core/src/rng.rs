//! Per-replica random streams.
//!
//! Replica `i` of an experiment with master seed `m` draws from ChaCha8
//! keyed by `seed_from_u64(m)` on stream `i`. Streams are independent of one
//! another and of the replica count, so adding replicas never perturbs the
//! earlier ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ReplicaRng = ChaCha8Rng;

pub fn replica_rng(master_seed: u64, replica: u64) -> ReplicaRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}
