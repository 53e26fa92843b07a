//! Deterministic seed derivation.
//!
//! All stochastic operations draw either from a counter-style per-cell hash
//! (schedule-independent by construction) or from a `ChaCha8Rng` whose seed is
//! derived with `mix2`/`mix3` from a master seed. Parallel code must derive one
//! stream per independent task (tree, completion, fold) so results do not
//! depend on the execution schedule.

use rand_chacha::ChaCha8Rng;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and one salt.
pub fn mix2(seed: u64, salt: u64) -> u64 {
    mix(seed ^ mix(salt))
}

/// Derive a child seed from a master seed and two salts.
pub fn mix3(seed: u64, a: u64, b: u64) -> u64 {
    mix2(mix2(seed, a), b)
}

/// Uniform draw in [0, 1) determined solely by (seed, row, col).
pub fn cell_uniform(seed: u64, row: usize, col: usize) -> f64 {
    let h = mix3(seed, row as u64, col as u64);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seeded ChaCha stream for sequential draws.
pub fn stream(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
