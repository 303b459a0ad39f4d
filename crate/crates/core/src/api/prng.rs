//! The multiplicative congruential generator that drives `sampleRows`.

use crate::error::{BenchError, ErrorKind, Outcome};

pub const MODULUS: u64 = (1 << 31) - 1;
pub const MULTIPLIER: u64 = 48271;

/// Checks that `seed` is a valid generator state in `[1, 2^31 - 2]`.
pub fn check_seed(seed: f64) -> Outcome<u32> {
    if seed.fract() != 0.0 || seed < 1.0 || seed > (MODULUS - 1) as f64 {
        return Err(BenchError::new(ErrorKind::InvalidSeed { seed }));
    }
    Ok(seed as u32)
}

/// `48271 * state mod (2^31 - 1)`.
pub fn prng_next(state: u32) -> Outcome<u32> {
    check_seed(state as f64)?;
    Ok(step(state))
}

fn step(state: u32) -> u32 {
    ((MULTIPLIER * state as u64) % MODULUS) as u32
}

/// A uniform draw in `[0, k)` from a generator output.
pub fn bounded(next: u32, k: usize) -> usize {
    ((next as u64 * k as u64) / MODULUS) as usize
}

/// Row indices chosen by a partial Fisher–Yates shuffle, in ascending
/// order.
pub fn sample_indices(nrows: usize, n: usize, seed: u32) -> Outcome<Vec<usize>> {
    let mut state = check_seed(seed as f64)?;
    let mut idx: Vec<usize> = (0..nrows).collect();
    for i in 0..n.min(nrows) {
        state = step(state);
        let j = i + bounded(state, nrows - i);
        idx.swap(i, j);
    }
    let mut chosen = idx[..n.min(nrows)].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}
