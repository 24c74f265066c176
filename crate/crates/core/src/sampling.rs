//! Seeded Monte Carlo sampling of measurement outcomes.
//!
//! Draws come from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`). Each
//! uniform variate is the top 53 bits of one `next_u64` output scaled by
//! `2⁻⁵³`, and outcomes are chosen by inverse CDF over positions in ascending
//! order. Identical `(distribution, n, seed, workers)` therefore give identical
//! counts on every platform.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform `[0, 1)` variates from a seeded ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Outcome counts of `total` draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ReportRepr", into = "ReportRepr")]
pub struct SampleReport {
    pub seed: u64,
    pub workers: usize,
    pub total: u64,
    pub counts: BTreeMap<i64, u64>,
    pub empirical: BTreeMap<i64, f64>,
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    seed: u64,
    workers: usize,
    total: u64,
    counts: Vec<CountEntry>,
    empirical: Vec<FrequencyEntry>,
}

#[derive(Serialize, Deserialize)]
struct CountEntry {
    position: i64,
    count: u64,
}

/// `{position, frequency}`; also the row format of frequency files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub position: i64,
    pub frequency: f64,
}

impl From<ReportRepr> for SampleReport {
    fn from(r: ReportRepr) -> Self {
        SampleReport {
            seed: r.seed,
            workers: r.workers,
            total: r.total,
            counts: r.counts.into_iter().map(|c| (c.position, c.count)).collect(),
            empirical: r
                .empirical
                .into_iter()
                .map(|f| (f.position, f.frequency))
                .collect(),
        }
    }
}

impl From<SampleReport> for ReportRepr {
    fn from(s: SampleReport) -> Self {
        ReportRepr {
            seed: s.seed,
            workers: s.workers,
            total: s.total,
            counts: s
                .counts
                .into_iter()
                .map(|(position, count)| CountEntry { position, count })
                .collect(),
            empirical: s
                .empirical
                .into_iter()
                .map(|(position, frequency)| FrequencyEntry { position, frequency })
                .collect(),
        }
    }
}

fn check_distribution(dist: &BTreeMap<i64, f64>) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::BadDistribution("empty".into()));
    }
    if let Some((x, p)) = dist.iter().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::BadDistribution(format!("p({x}) = {p}")));
    }
    let total: f64 = dist.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution(format!("sums to {total}")));
    }
    Ok(())
}

fn draw(cdf: &[(i64, f64)], fallback: i64, u: f64) -> i64 {
    cdf.iter()
        .find(|(_, c)| u < *c)
        .map_or(fallback, |(x, _)| *x)
}

fn count_draws(cdf: &[(i64, f64)], fallback: i64, n: u64, seed: u64) -> BTreeMap<i64, u64> {
    let mut stream = UniformStream::new(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..n {
        *counts.entry(draw(cdf, fallback, stream.next_f64())).or_insert(0) += 1;
    }
    counts
}

/// `n` independent draws from `dist` with a single stream seeded by `seed`.
pub fn sample_outcomes(dist: &BTreeMap<i64, f64>, n: u64, seed: u64) -> Result<SampleReport> {
    sample_outcomes_sharded(dist, n, seed, 1)
}

/// Splits the draws over `workers` threads. Worker `w` uses seed `seed + w`
/// and takes `n / workers` draws, plus one if `w < n % workers`.
pub fn sample_outcomes_sharded(
    dist: &BTreeMap<i64, f64>,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<SampleReport> {
    check_distribution(dist)?;
    if n == 0 {
        return Err(Error::BadDistribution("need at least one draw".into()));
    }
    if workers == 0 {
        return Err(Error::BadDistribution("need at least one worker".into()));
    }

    let mut acc = 0.0;
    let cdf: Vec<(i64, f64)> = dist
        .iter()
        .map(|(&x, &p)| {
            acc += p;
            (x, acc)
        })
        .collect();
    // rounding can leave the final cumulative value just under 1
    let fallback = dist
        .iter()
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map(|(x, _)| *x)
        .ok_or_else(|| Error::BadDistribution("all probabilities are zero".into()))?;

    let w = workers as u64;
    let shard = |k: u64| n / w + u64::from(k < n % w);
    let partials: Vec<BTreeMap<i64, u64>> = if workers == 1 {
        vec![count_draws(&cdf, fallback, n, seed)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..w)
                .map(|k| {
                    let cdf = &cdf;
                    scope.spawn(move || count_draws(cdf, fallback, shard(k), seed.wrapping_add(k)))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampling worker panicked"))
                .collect()
        })
    };

    let mut counts: BTreeMap<i64, u64> = dist.keys().map(|&x| (x, 0)).collect();
    for part in partials {
        for (x, c) in part {
            *counts.entry(x).or_insert(0) += c;
        }
    }
    let empirical = counts
        .iter()
        .map(|(&x, &c)| (x, c as f64 / n as f64))
        .collect();
    Ok(SampleReport {
        seed,
        workers,
        total: n,
        counts,
        empirical,
    })
}
