//! One-sided paired sign-flip permutation test.
//!
//! For a difference vector `d = a - b` the statistic is `T = mean(d)`. Each
//! resample flips the sign of every `d_k` independently with probability
//! 1/2 and the p-value is `(1 + #{T* >= T}) / (1 + R)`.
//!
//! All vectors tested under one tag share the same sign draws, which is
//! what makes the test of a scoring against itself reproduce its p-value
//! exactly and lets linear mixtures of scorings be tested from their
//! component statistics.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seed::derive_seed;
use crate::error::StatsError;

/// Largest vector length accepted in exhaustive mode.
pub const MAX_EXHAUSTIVE_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub resamples: usize,
    pub seed: u64,
    /// Enumerate all `2^N` sign vectors instead of sampling.
    pub exhaustive: bool,
}

impl PermutationConfig {
    pub fn new(resamples: usize, seed: u64) -> Result<Self, StatsError> {
        if resamples == 0 {
            return Err(StatsError::DomainError(
                "resamples must be at least 1".into(),
            ));
        }
        Ok(PermutationConfig {
            resamples,
            seed,
            exhaustive: false,
        })
    }

    pub fn exhaustive(seed: u64) -> Self {
        PermutationConfig {
            resamples: 1,
            seed,
            exhaustive: true,
        }
    }

    /// Smallest attainable p-value in sampled mode.
    pub fn min_pvalue(&self) -> f64 {
        1.0 / (self.resamples as f64 + 1.0)
    }
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig {
            resamples: 1000,
            seed: 0,
            exhaustive: false,
        }
    }
}

/// Observed and resampled statistics of one difference vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledStatistic {
    pub observed: f64,
    pub resampled: Vec<f64>,
    exhaustive: bool,
}

impl ResampledStatistic {
    pub fn pvalue(&self) -> f64 {
        let hits = self
            .resampled
            .iter()
            .filter(|&&t| t >= self.observed)
            .count();
        if self.exhaustive {
            hits as f64 / self.resampled.len() as f64
        } else {
            (1.0 + hits as f64) / (1.0 + self.resampled.len() as f64)
        }
    }

    /// Statistic of `sum_m w_m d_m`, valid because the statistic is linear in
    /// the differences and all parts were drawn under the same signs.
    pub fn combine(parts: &[(f64, &ResampledStatistic)]) -> ResampledStatistic {
        let (_, first) = parts[0];
        let mut observed = 0.0;
        let mut resampled = vec![0.0; first.resampled.len()];
        for &(w, part) in parts {
            debug_assert_eq!(part.resampled.len(), resampled.len());
            observed += w * part.observed;
            for (acc, t) in resampled.iter_mut().zip(&part.resampled) {
                *acc += w * t;
            }
        }
        ResampledStatistic {
            observed,
            resampled,
            exhaustive: first.exhaustive,
        }
    }
}

/// Runs the sign-flip test on several difference vectors at once under the
/// signs determined by `(cfg.seed, tag)`.
pub fn resample_statistics(
    diffs: &[&[f64]],
    cfg: &PermutationConfig,
    tag: &str,
) -> Result<Vec<ResampledStatistic>, StatsError> {
    let Some(first) = diffs.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    if n == 0 {
        return Err(StatsError::InsufficientData {
            required: 1,
            found: 0,
        });
    }
    if let Some(d) = diffs.iter().find(|d| d.len() != n) {
        return Err(StatsError::LengthMismatch(n, d.len()));
    }
    let inv_n = 1.0 / n as f64;

    let rows = if cfg.exhaustive {
        if n > MAX_EXHAUSTIVE_LEN {
            return Err(StatsError::DomainError(format!(
                "exhaustive enumeration limited to {MAX_EXHAUSTIVE_LEN} segments, got {n}"
            )));
        }
        1usize << n
    } else {
        if cfg.resamples == 0 {
            return Err(StatsError::DomainError(
                "resamples must be at least 1".into(),
            ));
        }
        cfg.resamples
    };

    // One byte of sign bits per block of eight segments; bit set = flipped.
    let blocks = n.div_ceil(8);
    let words = n.div_ceil(64);
    let mut sign_bytes = vec![0u8; rows * blocks];
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[tag]));
    for (r, row) in sign_bytes.chunks_exact_mut(blocks).enumerate() {
        for w in 0..words {
            let word = if cfg.exhaustive {
                if w == 0 {
                    r as u64
                } else {
                    0
                }
            } else {
                rng.next_u64()
            };
            for (b, byte) in word.to_le_bytes().into_iter().enumerate() {
                if let Some(slot) = row.get_mut(w * 8 + b) {
                    *slot = byte;
                }
            }
        }
    }

    let mut table = vec![0.0f64; blocks * 256];
    let identity = vec![0u8; blocks];
    Ok(diffs
        .iter()
        .map(|d| {
            fill_table(d, &mut table);
            ResampledStatistic {
                observed: table_sum(&table, &identity) * inv_n,
                resampled: sign_bytes
                    .chunks_exact(blocks)
                    .map(|row| table_sum(&table, row) * inv_n)
                    .collect(),
                exhaustive: cfg.exhaustive,
            }
        })
        .collect())
}

/// For each block of eight values, the signed sum under every one of the
/// 256 sign patterns. Padding past the end counts as zero.
fn fill_table(d: &[f64], table: &mut [f64]) {
    for (b, entries) in table.chunks_exact_mut(256).enumerate() {
        let mut x = [0.0f64; 8];
        for (l, v) in d.iter().skip(b * 8).take(8).enumerate() {
            x[l] = *v;
        }
        entries[0] = ((x[0] + x[1]) + (x[2] + x[3])) + ((x[4] + x[5]) + (x[6] + x[7]));
        for v in 1..256usize {
            let low = v.trailing_zeros() as usize;
            // flipping a zero leaves the sum bit-identical
            entries[v] = entries[v & (v - 1)] - 2.0 * x[low];
        }
    }
}

/// Sum of the block entries selected by one sign row, in a fixed order so
/// that identical inputs give identical statistics.
fn table_sum(table: &[f64], row: &[u8]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut chunks = row.chunks_exact(4);
    let mut base = 0;
    for c in &mut chunks {
        for l in 0..4 {
            acc[l] += table[(base + l) * 256 + c[l] as usize];
        }
        base += 4;
    }
    let mut tail = 0.0;
    for (l, &byte) in chunks.remainder().iter().enumerate() {
        tail += table[(base + l) * 256 + byte as usize];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// p-value that `a` is better than `b` (higher is better).
pub fn permutation_pvalue(
    a: &[f64],
    b: &[f64],
    cfg: &PermutationConfig,
    pair_tag: &str,
) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let stats = resample_statistics(&[&d], cfg, pair_tag)?;
    Ok(stats[0].pvalue())
}
