//! Streaming mean/variance and the deterministic partitioned sample loop.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SeedSpec;

/// Welford's single-pass mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination. Order matters bitwise, so callers
    /// merge in a fixed order.
    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * (other.count as f64 / n as f64);
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64 / n as f64);
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Bessel-corrected sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// A Monte Carlo result with its seed provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: SeedSpec,
}

impl Estimate {
    pub fn from_welford(acc: &Welford, seed: SeedSpec) -> Self {
        Estimate { mean: acc.mean(), stderr: acc.stderr(), n: acc.count(), seed }
    }

    /// `(mean - reference) / stderr`, with 0/0 read as 0.
    pub fn z_score(&self, reference: f64) -> f64 {
        z_score(self.mean - reference, self.stderr)
    }
}

/// Ratio of a deviation to its standard error; an exact zero deviation is 0
/// even when the error is 0.
pub fn z_score(deviation: f64, stderr: f64) -> f64 {
    if deviation == 0.0 {
        0.0
    } else {
        deviation / stderr
    }
}

/// `sqrt(a² + b²)` for independent standard errors.
pub fn combined_stderr(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Contiguous index ranges for `partitions` chunks of `n` samples.
fn partition_ranges(n: u64, partitions: usize) -> Vec<(u64, u64)> {
    let p = (partitions.max(1) as u64).min(n.max(1));
    let base = n / p;
    let extra = n % p;
    let mut start = 0;
    (0..p)
        .map(|k| {
            let len = base + u64::from(k < extra);
            let r = (start, start + len);
            start += len;
            r
        })
        .collect()
}

/// Runs `n` replicates of a `width`-valued sample in `partitions` chunks.
///
/// `sample(i, out)` fills `out` with the values of replicate `i`. Each chunk
/// accumulates locally; chunks are merged in index order, so the result only
/// depends on `partitions`, never on how many threads rayon uses.
pub fn run_partitioned<F>(n: u64, partitions: usize, width: usize, sample: F) -> Result<Vec<Welford>>
where
    F: Fn(u64, &mut [f64]) -> Result<()> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let chunks: Vec<Result<Vec<Welford>>> = partition_ranges(n, partitions)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut accs = vec![Welford::new(); width];
            let mut buf = vec![0.0; width];
            for i in lo..hi {
                sample(i, &mut buf)?;
                for (acc, v) in accs.iter_mut().zip(&buf) {
                    acc.push(*v);
                }
            }
            Ok(accs)
        })
        .collect();
    let mut total = vec![Welford::new(); width];
    for chunk in chunks {
        for (t, c) in total.iter_mut().zip(chunk?.iter()) {
            t.merge(c);
        }
    }
    Ok(total)
}

/// Scalar convenience wrapper around [`run_partitioned`].
pub fn run_scalar<F>(n: u64, partitions: usize, seed: SeedSpec, sample: F) -> Result<Estimate>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let acc = run_partitioned(n, partitions, 1, |i, out| {
        out[0] = sample(i)?;
        Ok(())
    })?;
    Ok(Estimate::from_welford(&acc[0], seed))
}

/// Default partition count: the number of logical cores.
pub fn default_partitions() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
