//! System-level pairwise accuracy (PA), soft pairwise accuracy (SPA) and
//! concordance counting between two human aspects.
//!
//! All inputs are oriented so that higher is better. Pairs `(i, j)` have
//! `i < j` in the matrices' system order, and the permutation p-values are
//! one-sided in the direction "system `j` beats system `i`".

use serde::{Deserialize, Serialize};

use crate::data::{ScoreMatrix, SystemPair};
use crate::error::{Error, Result};
use crate::scoring::system_means;
use crate::stats::{resample_statistics, PermutationConfig, ResampledStatistic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub value: f64,
    pub pairs_used: usize,
    pub pairs_excluded_human_tie: usize,
    /// Per-pair contribution (agreement indicator for PA, `1 - |dp|` for SPA).
    pub per_pair: Vec<(SystemPair, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConcordanceCounts {
    pub concordant: usize,
    pub discordant: usize,
    pub tied: usize,
}

impl ConcordanceCounts {
    pub fn total(&self) -> usize {
        self.concordant + self.discordant + self.tied
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of `means[j] - means[i]`; equal means give 0.
pub fn pair_sign(means: &[f64], pair: SystemPair) -> i8 {
    sign(means[pair.j()] - means[pair.i()])
}

/// Tag that selects the permutation signs for one system pair. Every
/// scoring of that pair shares it.
pub fn pair_tag(systems: &[String], pair: SystemPair) -> String {
    format!("pair\u{1f}{}\u{1f}{}", systems[pair.i()], systems[pair.j()])
}

/// PA over system means, skipping pairs tied in the human scores. A metric
/// tie against a human preference counts as disagreement.
pub fn pairwise_accuracy(metric: &ScoreMatrix, human: &ScoreMatrix) -> Result<PairwiseResult> {
    metric.check_shape(human)?;
    pairwise_accuracy_means(&system_means(metric), &system_means(human))
}

/// PA on precomputed system-level scores.
pub fn pairwise_accuracy_means(metric: &[f64], human: &[f64]) -> Result<PairwiseResult> {
    if metric.len() != human.len() {
        return Err(Error::InvalidArgument(format!(
            "{} metric means vs {} human means",
            metric.len(),
            human.len()
        )));
    }
    let mut per_pair = Vec::new();
    let mut excluded = 0;
    for pair in SystemPair::all(human.len()) {
        let h = pair_sign(human, pair);
        if h == 0 {
            excluded += 1;
            continue;
        }
        let agree = pair_sign(metric, pair) == h;
        per_pair.push((pair, if agree { 1.0 } else { 0.0 }));
    }
    if per_pair.is_empty() {
        return Err(Error::NoUsablePairs);
    }
    let value = per_pair.iter().map(|(_, c)| c).sum::<f64>() / per_pair.len() as f64;
    Ok(PairwiseResult {
        value,
        pairs_used: per_pair.len(),
        pairs_excluded_human_tie: excluded,
        per_pair,
    })
}

/// Calls `visit` once per system pair with the resampled statistics of
/// `x_j - x_i` for every matrix, all drawn under the pair's shared signs.
pub fn for_each_pair_statistics(
    matrices: &[&ScoreMatrix],
    cfg: &PermutationConfig,
    mut visit: impl FnMut(SystemPair, Vec<ResampledStatistic>),
) -> Result<()> {
    let Some(first) = matrices.first() else {
        return Ok(());
    };
    for m in matrices {
        first.check_shape(m)?;
    }
    let systems = first.systems();
    let mut diffs: Vec<Vec<f64>> = vec![Vec::new(); matrices.len()];
    for pair in SystemPair::all(first.num_systems()) {
        for (m, d) in matrices.iter().zip(diffs.iter_mut()) {
            d.clear();
            d.extend(
                m.row(pair.j())
                    .iter()
                    .zip(m.row(pair.i()))
                    .map(|(xj, xi)| xj - xi),
            );
        }
        let views: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
        let stats = resample_statistics(&views, cfg, &pair_tag(systems, pair))?;
        visit(pair, stats);
    }
    Ok(())
}

/// `p(x_j > x_i)` for every pair (outer) and matrix (inner).
pub fn pairwise_pvalues(
    matrices: &[&ScoreMatrix],
    cfg: &PermutationConfig,
) -> Result<Vec<(SystemPair, Vec<f64>)>> {
    let mut out = Vec::new();
    for_each_pair_statistics(matrices, cfg, |pair, stats| {
        out.push((pair, stats.iter().map(ResampledStatistic::pvalue).collect()));
    })?;
    Ok(out)
}

fn spa_from_pvalues(per_pair: Vec<(SystemPair, f64)>) -> PairwiseResult {
    let value = if per_pair.is_empty() {
        0.0
    } else {
        per_pair.iter().map(|(_, c)| c).sum::<f64>() / per_pair.len() as f64
    };
    PairwiseResult {
        value,
        pairs_used: per_pair.len(),
        pairs_excluded_human_tie: 0,
        per_pair,
    }
}

/// SPA: mean over all pairs of `1 - |p_human - p_metric|`. No pairs are
/// excluded.
pub fn soft_pairwise_accuracy(
    metric: &ScoreMatrix,
    human: &ScoreMatrix,
    cfg: &PermutationConfig,
) -> Result<PairwiseResult> {
    Ok(soft_pairwise_accuracy_many(&[metric], human, cfg)?.remove(0))
}

/// SPA of several metrics against one human scoring, sharing the human
/// p-values.
pub fn soft_pairwise_accuracy_many(
    metrics: &[&ScoreMatrix],
    human: &ScoreMatrix,
    cfg: &PermutationConfig,
) -> Result<Vec<PairwiseResult>> {
    let mut all: Vec<&ScoreMatrix> = vec![human];
    all.extend_from_slice(metrics);
    let pvalues = pairwise_pvalues(&all, cfg)?;
    Ok((0..metrics.len())
        .map(|m| {
            spa_from_pvalues(
                pvalues
                    .iter()
                    .map(|(pair, p)| (*pair, 1.0 - (p[0] - p[m + 1]).abs()))
                    .collect(),
            )
        })
        .collect())
}

/// Classifies each pair by whether the two aspects order the systems the
/// same way.
pub fn concordance_counts(
    adequacy: &ScoreMatrix,
    fluency: &ScoreMatrix,
) -> Result<ConcordanceCounts> {
    adequacy.check_shape(fluency)?;
    Ok(concordance_counts_means(
        &system_means(adequacy),
        &system_means(fluency),
    ))
}

pub fn concordance_counts_means(adequacy: &[f64], fluency: &[f64]) -> ConcordanceCounts {
    let mut c = ConcordanceCounts::default();
    for pair in SystemPair::all(adequacy.len()) {
        match pair_sign(adequacy, pair) * pair_sign(fluency, pair) {
            1 => c.concordant += 1,
            -1 => c.discordant += 1,
            _ => c.tied += 1,
        }
    }
    c
}
