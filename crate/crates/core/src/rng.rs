//! Counter-based random streams.
//!
//! Every trial draws from a ChaCha8 stream whose key is derived from
//! `(seed, tag)` and whose 64-bit stream id is the trial index, so the bits a
//! trial sees depend on nothing but those three numbers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Logical stream families. Distinct tags never share key material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Config = 1,
    Noise = 2,
    Revealment = 3,
}

#[derive(Debug, Clone)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64, tag: StreamTag) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&splitmix64(seed).to_le_bytes());
        key[8..16].copy_from_slice(&splitmix64(seed ^ 0x9E37_79B9_7F4A_7C15).to_le_bytes());
        key[16..24].copy_from_slice(&splitmix64(tag as u64).to_le_bytes());
        key[24..32].copy_from_slice(&(tag as u64).to_le_bytes());
        Self {
            base: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Threshold `t` such that a uniform `u32` is below `t` with probability `p`
/// (up to 2^-32). `p = 0` and `p = 1` are exact.
#[inline]
pub fn bernoulli_threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1 << 32
    } else {
        (p * 4_294_967_296.0).round() as u64
    }
}

#[inline]
pub fn draw(rng: &mut ChaCha8Rng, threshold: u64) -> bool {
    (rng.next_u32() as u64) < threshold
}
