//! Reproducible random substreams.
//!
//! Every replication of a Monte Carlo experiment draws from its own ChaCha8
//! stream, selected by `(seed, stream_id)`. The generator is counter based, so
//! replication `i` sees the same numbers whichever worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Builds the generator for substream `stream_id` of master seed `seed`.
pub fn substream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Derives an independent master seed for a labelled sub-experiment.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
