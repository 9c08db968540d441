//! Importance-sampled Monte Carlo for integrals int f(u) du with product
//! proposals: Gaussian or uniform per coordinate, plus a uniform-disk
//! proposal for radially cut transverse momenta.
//!
//! Randomness is counter-based and keyed by (seed, shard, sample index), so
//! an estimate depends only on (seed, n, shards, spec), never on thread
//! scheduling. Errors come from 32 batch means; per-shard partials combine
//! pairwise in fixed shard order.

use rayon::prelude::*;
use thiserror::Error;

/// Number of batches for the batch-means error estimate.
pub const N_BATCHES: usize = 32;

/// Minimum sample count: below this the batch-means error is unreliable.
pub const MIN_SAMPLES: u64 = 10_000;

/// Hard cap on integrand arity (the 12-dimensional pair-correlation
/// integral is the largest user).
pub const MAX_DIM: usize = 12;

#[derive(Debug, Error)]
pub enum McError {
    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: u64, min: u64 },
    #[error("integrand returned a non-finite value at u = {coords:?}")]
    NonFinite { coords: Vec<f64> },
    #[error("estimate of a normalization consistent with zero: {value} +/- {std_err}")]
    ConsistentWithZero { value: f64, std_err: f64 },
}

/// One proposal factor. `Disk` produces two coordinates (a point uniform on
/// a disk of the given radius); the others produce one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Proposal {
    Gaussian { std: f64 },
    Uniform { lo: f64, hi: f64 },
    Disk { radius: f64 },
}

impl Proposal {
    fn n_coords(&self) -> usize {
        match self {
            Proposal::Disk { .. } => 2,
            _ => 1,
        }
    }
}

/// Product proposal over all integrand coordinates, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    coords: Vec<Proposal>,
    dim: usize,
}

impl SamplerSpec {
    pub fn new(coords: Vec<Proposal>) -> Self {
        let mut dim = 0;
        for c in &coords {
            match *c {
                Proposal::Gaussian { std } => assert!(std > 0.0, "proposal std must be positive"),
                Proposal::Uniform { lo, hi } => assert!(lo < hi, "uniform needs lo < hi"),
                Proposal::Disk { radius } => assert!(radius > 0.0, "disk radius must be positive"),
            }
            dim += c.n_coords();
        }
        assert!((1..=MAX_DIM).contains(&dim), "arity {dim} out of range");
        SamplerSpec { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Joint proposal density at a point (used by the estimator to weight
    /// samples; public so tests can verify self-normalization bit-exactly).
    pub fn density(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let mut p = 1.0;
        let mut i = 0;
        for c in &self.coords {
            match *c {
                Proposal::Gaussian { std } => {
                    let x = u[i];
                    p *= (-x * x / (2.0 * std * std)).exp()
                        / (std * (2.0 * std::f64::consts::PI).sqrt());
                    i += 1;
                }
                Proposal::Uniform { lo, hi } => {
                    p *= 1.0 / (hi - lo);
                    i += 1;
                }
                Proposal::Disk { radius } => {
                    p *= 1.0 / (std::f64::consts::PI * radius * radius);
                    i += 2;
                }
            }
        }
        p
    }

    /// Draw one point; returns the joint density.
    fn draw(&self, rng: &mut CounterRng, u: &mut [f64]) -> f64 {
        let mut i = 0;
        for c in &self.coords {
            match *c {
                Proposal::Gaussian { std } => {
                    u[i] = std * rng.standard_normal();
                    i += 1;
                }
                Proposal::Uniform { lo, hi } => {
                    u[i] = lo + (hi - lo) * rng.uniform();
                    i += 1;
                }
                Proposal::Disk { radius } => {
                    let r = radius * rng.uniform().sqrt();
                    let phi = 2.0 * std::f64::consts::PI * rng.uniform();
                    u[i] = r * phi.cos();
                    u[i + 1] = r * phi.sin();
                    i += 2;
                }
            }
        }
        self.density(&u[..self.dim])
    }
}

/// Counter-based generator: every (seed, shard, sample) triple owns an
/// independent stream, so samples can be generated in any order on any
/// number of workers.
pub struct CounterRng {
    key: u64,
    ctr: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// 64-bit finalizer with full avalanche.
#[inline]
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

impl CounterRng {
    pub fn new(seed: u64, shard: u64, sample: u64) -> Self {
        let mut key = mix(seed ^ 0x243F_6A88_85A3_08D3);
        key = mix(key.wrapping_add(shard.wrapping_mul(GOLDEN)));
        key = mix(key ^ sample.wrapping_mul(0xBF58_476D_1CE4_E5B9));
        CounterRng { key, ctr: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.ctr = self.ctr.wrapping_add(1);
        mix(self.key.wrapping_add(self.ctr.wrapping_mul(GOLDEN)))
    }

    /// Uniform in (0, 1]: 53 mantissa bits, never exactly 0 so logs are safe.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by Box-Muller; consumes exactly two draws.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Sampling budget for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McParams {
    pub n_samples: u64,
    pub seed: u64,
    pub shards: u32,
}

impl Default for McParams {
    fn default() -> Self {
        McParams {
            n_samples: 1_000_000,
            seed: 0,
            shards: 8,
        }
    }
}

/// Result of one Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    /// Batch-means standard error.
    pub std_err: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub n_shards: u32,
}

impl McEstimate {
    pub fn rel_err(&self) -> f64 {
        self.std_err / self.value.abs()
    }

    pub fn consistent_with_zero(&self) -> bool {
        self.value.abs() <= 3.0 * self.std_err
    }
}

struct Partial<const M: usize> {
    batch_sums: [[f64; N_BATCHES]; M],
    batch_counts: [u64; N_BATCHES],
}

/// Estimate an M-component integral; all components share the same sample
/// points (so e.g. real and imaginary parts stay perfectly correlated).
pub fn estimate_multi<const M: usize, F>(
    f: F,
    spec: &SamplerSpec,
    n: u64,
    seed: u64,
    shards: u32,
) -> Result<[McEstimate; M], McError>
where
    F: Fn(&[f64], &mut [f64; M]) + Sync,
{
    if n < MIN_SAMPLES {
        return Err(McError::TooFewSamples { n, min: MIN_SAMPLES });
    }
    let shards = shards.max(1);
    let dim = spec.dim();

    let partials: Result<Vec<Partial<M>>, McError> = (0..shards as u64)
        .into_par_iter()
        .map(|shard| {
            let start = shard * n / shards as u64;
            let end = (shard + 1) * n / shards as u64;
            let mut p = Partial {
                batch_sums: [[0.0; N_BATCHES]; M],
                batch_counts: [0; N_BATCHES],
            };
            let mut u = [0.0f64; MAX_DIM];
            let mut fv = [0.0f64; M];
            for i in start..end {
                let mut rng = CounterRng::new(seed, shard, i - start);
                let pdf = spec.draw(&mut rng, &mut u[..dim]);
                f(&u[..dim], &mut fv);
                let batch = (i as u128 * N_BATCHES as u128 / n as u128) as usize;
                p.batch_counts[batch] += 1;
                for (m, &fm) in fv.iter().enumerate() {
                    let w = fm / pdf;
                    if !w.is_finite() {
                        return Err(McError::NonFinite {
                            coords: u[..dim].to_vec(),
                        });
                    }
                    p.batch_sums[m][batch] += w;
                }
            }
            Ok(p)
        })
        .collect();
    let partials = partials?;

    // Fixed-order pairwise combination keeps the reduction deterministic and
    // cancels less than a left fold.
    let combined = pairwise_combine(partials);

    let mut out = [McEstimate {
        value: 0.0,
        std_err: 0.0,
        n_samples: n,
        seed,
        n_shards: shards,
    }; M];
    for m in 0..M {
        let sums = &combined.batch_sums[m];
        let counts = &combined.batch_counts;
        let total: f64 = pairwise_sum(sums);
        let value = total / n as f64;
        // Batch means around their own mean; batch sizes differ by at most
        // one so the equal-weight formula is adequate.
        let means: Vec<f64> = sums
            .iter()
            .zip(counts.iter())
            .map(|(&s, &c)| s / c.max(1) as f64)
            .collect();
        let grand = means.iter().sum::<f64>() / N_BATCHES as f64;
        let var = means.iter().map(|&x| (x - grand) * (x - grand)).sum::<f64>()
            / (N_BATCHES as f64 - 1.0);
        out[m].value = value;
        out[m].std_err = (var / N_BATCHES as f64).sqrt();
    }
    Ok(out)
}

/// Scalar-integrand front end of `estimate_multi`.
pub fn estimate<F>(
    f: F,
    spec: &SamplerSpec,
    n: u64,
    seed: u64,
    shards: u32,
) -> Result<McEstimate, McError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let [e] = estimate_multi(|u, out: &mut [f64; 1]| out[0] = f(u), spec, n, seed, shards)?;
    Ok(e)
}

fn pairwise_combine<const M: usize>(mut parts: Vec<Partial<M>>) -> Partial<M> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for m in 0..M {
                    for k in 0..N_BATCHES {
                        a.batch_sums[m][k] += b.batch_sums[m][k];
                    }
                }
                for k in 0..N_BATCHES {
                    a.batch_counts[k] += b.batch_counts[k];
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.into_iter().next().unwrap()
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Derived seed for sweep point `index`: decorrelates points while keeping
/// the whole sweep reproducible from one base seed.
pub fn point_seed(base: u64, index: u64) -> u64 {
    mix(base.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}
