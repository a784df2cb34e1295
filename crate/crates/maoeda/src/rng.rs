//! Seeded, named rng streams.
//!
//! One master seed spawns independent streams for each pipeline phase
//! (init, pcsea, repair, offspring, mc-hv, ...). Disabling one phase leaves
//! the draws of every other phase unchanged, which makes ablations and
//! determinism directly testable.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic rng for a named stream under a master seed.
pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name.as_bytes()));
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
