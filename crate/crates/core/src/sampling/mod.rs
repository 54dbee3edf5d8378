//! Stream-addressable random variates.
//!
//! Every Monte Carlo replicate owns its own [`RngStream`], addressed by a
//! [`SeedSpec`] triple `(base_seed, stream_id, sample_index)`:
//!
//! * `base_seed` is the user-facing seed (`--seed` on the command line),
//! * `stream_id` selects an independent family of replicates; grid
//!   evaluation with common random numbers shares one `stream_id` across all
//!   query points, independent evaluation uses the query-point index,
//! * `sample_index` is the replicate number within that family.
//!
//! The triple is encrypted with Philox4x64-10 (key `(base_seed, stream_id)`,
//! counter `(sample_index, 0, 0, 0)`) and the 256-bit block seeds a
//! xoshiro256++ generator that serves the replicate's draws. For a fixed key
//! Philox is a bijection of the counter, so distinct replicates of a stream
//! never share a state, and sample `i` is a pure function of its `SeedSpec`
//! no matter which thread draws it. Seeding costs one Philox block per
//! replicate; the draws themselves run at xoshiro speed.

mod philox;

pub use philox::philox4x64_10;

use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// Address of one Monte Carlo replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub stream_id: u64,
    pub sample_index: u64,
}

impl SeedSpec {
    pub fn new(base_seed: u64, stream_id: u64, sample_index: u64) -> Self {
        SeedSpec { base_seed, stream_id, sample_index }
    }

    /// The first replicate of stream 0 under `base_seed`.
    pub fn from_base(base_seed: u64) -> Self {
        SeedSpec::new(base_seed, 0, 0)
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        SeedSpec { stream_id, ..self }
    }

    /// Replicate `i` counted from this spec's `sample_index`.
    pub fn offset(self, i: u64) -> Self {
        SeedSpec { sample_index: self.sample_index.wrapping_add(i), ..self }
    }

    /// Seed used by the single-retry policy of the verifier.
    pub fn retry(self) -> Self {
        SeedSpec { base_seed: self.base_seed ^ RETRY_SALT, ..self }
    }
}

/// XORed into `base_seed` for the verification retry.
pub const RETRY_SALT: u64 = 0x5DEE_CE66_D1CE_5EED;

/// Generator for one replicate.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: SeedSpec) -> Self {
        let block = philox4x64_10([seed.sample_index, 0, 0, 0], [seed.base_seed, seed.stream_id]);
        let mut bytes = [0u8; 32];
        for (chunk, word) in bytes.chunks_exact_mut(8).zip(block) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        RngStream { inner: Xoshiro256PlusPlus::from_seed(bytes) }
    }

    /// Uniform on the open interval (0, 1); never returns 0, 1/2 or 1.
    #[inline]
    pub fn uniform_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// One draw from N(0, 1) (ziggurat).
#[inline]
pub fn sample_standard_normal(stream: &mut RngStream) -> f64 {
    StandardNormal.sample(stream)
}

/// One draw from the standard Cauchy law, `tan(π(U − 1/2))`.
///
/// Consumes exactly one uniform and is monotone in it.
#[inline]
pub fn sample_standard_cauchy(stream: &mut RngStream) -> f64 {
    let u = stream.uniform_open01();
    (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Fills `out` with a unit vector uniform on the sphere `S^{len-1}`.
///
/// In one dimension this is a fair sign; otherwise a normalised Gaussian vector.
#[inline]
pub fn fill_uniform_sphere(stream: &mut RngStream, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = if stream.next_u64() >> 63 == 0 { 1.0 } else { -1.0 };
        return;
    }
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = sample_standard_normal(stream);
            norm2 += *v * *v;
        }
        // A zero Gaussian vector has probability zero but would divide by zero.
        if norm2 > 0.0 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Unit vector uniform on `S^{dim-1}`.
pub fn sample_uniform_sphere(stream: &mut RngStream, dim: usize) -> Point {
    let mut v = vec![0.0; dim.max(1)];
    fill_uniform_sphere(stream, &mut v);
    Point::from_vec_unchecked(v)
}
