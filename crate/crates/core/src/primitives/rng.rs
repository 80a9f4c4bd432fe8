//! Deterministic uniform stream for type sampling.
//!
//! Draw `i` of seed `s` is the `i`-th 64-bit output of ChaCha20 keyed by
//! `ChaCha20Rng::seed_from_u64(s)`, read at word position `2i`, mapped to
//! `((x >> 11) + 0.5) · 2⁻⁵³ ∈ (0, 1)`. Because the generator is
//! counter-based, any index range can be produced independently, so
//! parallel partitions reproduce the sequential output bit for bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::TypeDistribution;
use crate::error::{param, Result};

const CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformStream {
    seed: u64,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Writes draws `start .. start + out.len()` into `out`.
    pub fn fill(&self, start: u64, out: &mut [f64]) {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_word_pos(2 * start as u128);
        for u in out.iter_mut() {
            *u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        }
    }
}

/// `n` i.i.d. types by inverse-CDF transform of the seeded uniform stream.
pub fn sample_types(dist: &TypeDistribution, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(param("sample size must be >= 1"));
    }
    let stream = UniformStream::new(seed);
    let mut out = vec![0.0; n];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        stream.fill((c * CHUNK) as u64, chunk);
        for u in chunk.iter_mut() {
            *u = dist.quantile(*u);
        }
    });
    Ok(out)
}

/// Types `start .. start + len` of the stream that [`sample_types`] draws.
pub fn sample_types_range(dist: &TypeDistribution, seed: u64, start: u64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    UniformStream::new(seed).fill(start, &mut out);
    for u in out.iter_mut() {
        *u = dist.quantile(*u);
    }
    out
}
