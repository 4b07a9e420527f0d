//! Monte Carlo estimation of cone volumes on the unit sphere.
//!
//! Sampling is counter-based: sample `i` of a run is a pure function of
//! `(seed, i)`, drawn from its own ChaCha substream. Estimates are therefore
//! bit-identical for any number of workers, and the per-support hit counts
//! reduce over integers, which keeps the aggregation exact.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    model_descent_contains_unchecked, signed_cone_contains_unchecked, sorted_indices_desc,
    SparsityModel, WeightVector,
};

/// Derive an independent child seed for a sub-task (restart, trial, ...).
/// SplitMix64 finalizer over the xor of parent seed and task index.
pub(crate) fn substream_seed(seed: u64, domain: u64, index: u64) -> u64 {
    let mut x = seed ^ domain.wrapping_mul(0x9e3779b97f4a7c15) ^ index;
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// A Monte Carlo estimate of a sphere fraction, with its binomial standard
/// error: `std_error = sqrt(p(1-p)/samples)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl EstimateWithError {
    pub fn from_hits(hits: u64, samples: u64, seed: u64) -> Self {
        let p = hits as f64 / samples as f64;
        EstimateWithError {
            estimate: p,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    /// `1 - estimate`, same standard error (p(1-p) is symmetric).
    pub fn complement(&self) -> Self {
        EstimateWithError {
            estimate: 1.0 - self.estimate,
            ..*self
        }
    }
}

/// Uniform sampler on the unit sphere of R^n: Gaussian draws, normalized.
/// `sample(i)` is a deterministic function of `(seed, i)`.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    n: usize,
    base: ChaCha8Rng,
}

impl SphereSampler {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("sphere dimension must be >= 1".into()));
        }
        Ok(SphereSampler {
            n,
            base: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sample(&self, index: u64) -> Vec<f64> {
        let mut buf = vec![0.0; self.n];
        self.sample_into(&mut buf, index);
        buf
    }

    /// Fill `buf` with sphere sample `index`. Zero-norm draws (probability
    /// zero) are re-drawn from the same substream.
    pub fn sample_into(&self, buf: &mut [f64], index: u64) {
        debug_assert_eq!(buf.len(), self.n);
        let mut rng = self.base.clone();
        rng.set_stream(index);
        loop {
            let mut norm_sq = 0.0;
            for x in buf.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *x = g;
                norm_sq += g * g;
            }
            if norm_sq > 1e-300 {
                let inv = norm_sq.sqrt().recip();
                for x in buf.iter_mut() {
                    *x *= inv;
                }
                return;
            }
        }
    }

    pub fn iter(&self, count: u64) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..count).map(move |i| self.sample(i))
    }
}

/// Materialize `count` i.i.d. uniform sphere points.
pub fn sample_sphere(n: usize, count: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count < 1 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let sampler = SphereSampler::new(n, seed)?;
    Ok(sampler.iter(count).collect())
}

/// Fraction of uniform sphere samples satisfying `predicate`, with binomial
/// standard error. The reduction is an integer sum, so the result does not
/// depend on the worker count.
pub fn estimate_cone_fraction<F>(
    predicate: F,
    n: usize,
    count: u64,
    seed: u64,
) -> Result<EstimateWithError>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    if count < 1 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let sampler = SphereSampler::new(n, seed)?;
    let hits: u64 = (0..count)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, i| {
                sampler.sample_into(buf, i);
                u64::from(predicate(buf))
            },
        )
        .sum();
    Ok(EstimateWithError::from_hits(hits, count, seed))
}

/// Uniform vs non-uniform mode for Monte Carlo compliance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McMode {
    /// `1 - vol(union of all k-sparse descent cones) / vol(sphere)`.
    U,
    /// `1 - max over signed k-supports of vol(cone) / vol(sphere)`.
    Nu,
}

/// Knobs for the non-uniform support enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    /// Enumerate supports exhaustively while `C(n,k) * 2^k` stays at or
    /// under this cap.
    pub support_cap: u64,
    /// Number of random supports tried when the cap is exceeded.
    pub sampled_supports: usize,
    /// Whether falling back to sampled supports is allowed at all.
    pub allow_sampling: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            support_cap: 4096,
            sampled_supports: 64,
            allow_sampling: true,
        }
    }
}

/// Monte Carlo compliance measure for any n. Mode U uses model-level
/// membership; mode NU maximizes the per-cone fraction over k-supports
/// (cone areas do not depend on the sign pattern, so signs are fixed).
pub fn mc_compliance(
    w: &WeightVector,
    model: &SparsityModel,
    mode: McMode,
    count: u64,
    seed: u64,
) -> Result<EstimateWithError> {
    mc_compliance_with(w, model, mode, count, seed, &McOptions::default())
}

pub fn mc_compliance_with(
    w: &WeightVector,
    model: &SparsityModel,
    mode: McMode,
    count: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<EstimateWithError> {
    if w.len() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: w.len(),
        });
    }
    if count < 1 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    match mode {
        McMode::U => {
            let ws = w.as_slice().to_vec();
            let k = model.k;
            let est = estimate_cone_fraction(
                move |z| model_descent_contains_unchecked(&ws, k, z),
                model.n,
                count,
                seed,
            )?;
            Ok(est.complement())
        }
        McMode::Nu => {
            let supports = nu_supports(w, model, seed, opts)?;
            let entries: Vec<Vec<(usize, i8)>> = supports
                .iter()
                .map(|s| s.iter().map(|&i| (i, 1i8)).collect())
                .collect();
            let sampler = SphereSampler::new(model.n, seed)?;
            let ws = w.as_slice().to_vec();
            let m = supports.len();
            // Per-support integer hit counts, merged by element-wise addition.
            let hits: Vec<u64> = (0..count)
                .into_par_iter()
                .fold(
                    || (vec![0u64; m], vec![0.0f64; model.n]),
                    |(mut acc, mut buf), i| {
                        sampler.sample_into(&mut buf, i);
                        for (a, ent) in acc.iter_mut().zip(&entries) {
                            if signed_cone_contains_unchecked(&ws, ent, &buf) {
                                *a += 1;
                            }
                        }
                        (acc, buf)
                    },
                )
                .map(|(acc, _)| acc)
                .reduce(
                    || vec![0u64; m],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                );
            // First support attaining the max wins: the smallest-weight
            // support is listed first, matching the symmetry argument.
            let best = hits.iter().copied().max().unwrap_or(0);
            Ok(EstimateWithError::from_hits(best, count, seed).complement())
        }
    }
}

/// Supports probed in NU mode: the k smallest weights first (where the
/// largest cone lives, by weight symmetry), then the rest, enumerated
/// exhaustively while `C(n,k) * 2^k <= cap`, otherwise sampled.
fn nu_supports(
    w: &WeightVector,
    model: &SparsityModel,
    seed: u64,
    opts: &McOptions,
) -> Result<Vec<Vec<usize>>> {
    let n = model.n;
    let k = model.k.min(n);
    let order = sorted_indices_desc(w.as_slice());
    let mut smallest: Vec<usize> = order[n - k..].to_vec();
    smallest.sort_unstable();

    let signed_count = binomial(n as u64, k as u64).saturating_mul(1u64 << k.min(63));
    if signed_count <= opts.support_cap {
        let mut out = vec![smallest.clone()];
        let mut combos = Vec::new();
        combinations(n, k, &mut combos);
        for c in combos {
            if c != smallest {
                out.push(c);
            }
        }
        Ok(out)
    } else if opts.allow_sampling {
        let mut out = vec![smallest];
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, 0x5350, 0));
        while out.len() < opts.sampled_supports.max(1) {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let mut s: Vec<usize> = idx[..k].to_vec();
            s.sort_unstable();
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    } else {
        Err(Error::Capacity(format!(
            "{signed_count} signed supports exceed cap {} and sampling is disabled",
            opts.support_cap
        )))
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), out);
}
