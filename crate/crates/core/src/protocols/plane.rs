//! The SPA plane: every metric becomes a point (SPA vs fluency, SPA vs
//! adequacy), bounded by a tradeoff line that mixes the two aspects and by
//! two knowledge lines that mix one aspect with random scores.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Orientation, ScoreMatrix};
use crate::error::{Error, Result};
use crate::meta::for_each_pair_statistics;
use crate::stats::{derive_seed, PermutationConfig, ResampledStatistic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SPAPlanePoint {
    pub label: String,
    /// SPA against fluency.
    pub x: f64,
    /// SPA against adequacy.
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineKind {
    Tradeoff,
    AdequacyKnowledge,
    FluencyKnowledge,
}

impl std::fmt::Display for LineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LineKind::Tradeoff => "tradeoff",
            LineKind::AdequacyKnowledge => "adequacy-knowledge",
            LineKind::FluencyKnowledge => "fluency-knowledge",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentinelLine {
    pub kind: LineKind,
    /// One point per grid value, labelled with its weight on the first
    /// component (adequacy for the tradeoff line, the aspect otherwise).
    pub points: Vec<SPAPlanePoint>,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SPAPlane {
    pub points: Vec<SPAPlanePoint>,
    pub lines: Vec<SentinelLine>,
    pub pairs: usize,
}

impl SPAPlane {
    pub fn line(&self, kind: LineKind) -> &SentinelLine {
        self.lines
            .iter()
            .find(|l| l.kind == kind)
            .expect("all three lines are built")
    }
}

/// Supplies the random scores mixed into the knowledge lines.
pub trait NoiseSource {
    /// Oriented scores shaped like `aspect` for one random instance.
    fn sample(
        &self,
        aspect: &ScoreMatrix,
        kind: LineKind,
        instance: usize,
        seed: u64,
    ) -> ScoreMatrix;
}

/// Per cell, uniform between the segment's lowest and highest aspect score.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformNoise;

impl NoiseSource for UniformNoise {
    fn sample(
        &self,
        aspect: &ScoreMatrix,
        kind: LineKind,
        instance: usize,
        seed: u64,
    ) -> ScoreMatrix {
        let (k, n) = aspect.shape();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            seed,
            &["noise", &kind.to_string(), &instance.to_string()],
        ));
        let mut values = vec![0.0; k * n];
        for j in 0..n {
            let (lo, hi) = (0..k).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                let v = aspect.get(i, j);
                (lo.min(v), hi.max(v))
            });
            for i in 0..k {
                values[i * n + j] = if lo < hi {
                    rng.random_range(lo..=hi)
                } else {
                    lo
                };
            }
        }
        ScoreMatrix::from_oriented(
            format!("noise-{kind}-{instance}"),
            aspect.systems().to_vec(),
            aspect.segments().to_vec(),
            values,
            Orientation::HigherBetter,
        )
        .expect("noise has the aspect's shape")
    }
}

/// `0.0, 0.05, ..., 1.0`.
pub fn default_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaPlaneConfig {
    pub permutation: PermutationConfig,
    pub grid: Vec<f64>,
    pub instances: usize,
    pub noise_seed: u64,
}

impl Default for SpaPlaneConfig {
    fn default() -> Self {
        SpaPlaneConfig {
            permutation: PermutationConfig::default(),
            grid: default_grid(),
            instances: 10,
            noise_seed: 0,
        }
    }
}

impl SpaPlaneConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.grid.iter().all(|l| (0.0..=1.0).contains(l))
            && self.grid.contains(&0.0)
            && self.grid.contains(&1.0);
        if !ok {
            return Err(Error::InvalidArgument(
                "grid must lie in [0, 1] and include both endpoints".into(),
            ));
        }
        if self.instances == 0 {
            return Err(Error::InvalidArgument(
                "knowledge lines need at least one instance".into(),
            ));
        }
        Ok(())
    }
}

fn mix(lambda: f64, a: &ResampledStatistic, b: &ResampledStatistic) -> f64 {
    ResampledStatistic::combine(&[(lambda, a), (1.0 - lambda, b)]).pvalue()
}

/// Places each metric on the plane and builds the three sentinel lines.
///
/// Mixtures are tested from their components' resampled statistics: the
/// statistic is linear in the scores and all scorings of a pair share the
/// same sign draws, so this matches testing the mixed matrix directly up
/// to rounding.
pub fn spa_plane(
    metrics: &[&ScoreMatrix],
    adequacy: &ScoreMatrix,
    fluency: &ScoreMatrix,
    cfg: &SpaPlaneConfig,
) -> Result<SPAPlane> {
    spa_plane_with_noise(metrics, adequacy, fluency, cfg, &UniformNoise)
}

pub fn spa_plane_with_noise(
    metrics: &[&ScoreMatrix],
    adequacy: &ScoreMatrix,
    fluency: &ScoreMatrix,
    cfg: &SpaPlaneConfig,
    noise: &dyn NoiseSource,
) -> Result<SPAPlane> {
    cfg.validate()?;
    adequacy.check_shape(fluency)?;
    let inst = cfg.instances;
    let noise_a: Vec<ScoreMatrix> = (0..inst)
        .map(|i| noise.sample(adequacy, LineKind::AdequacyKnowledge, i, cfg.noise_seed))
        .collect();
    let noise_f: Vec<ScoreMatrix> = (0..inst)
        .map(|i| noise.sample(fluency, LineKind::FluencyKnowledge, i, cfg.noise_seed))
        .collect();

    let mut all: Vec<&ScoreMatrix> = vec![adequacy, fluency];
    all.extend_from_slice(metrics);
    all.extend(noise_a.iter());
    all.extend(noise_f.iter());
    let m = metrics.len();
    let g = cfg.grid.len();

    // running sums of (x, y) per metric and per (line, grid value)
    let mut metric_sums = vec![(0.0, 0.0); m];
    let mut line_sums = vec![vec![(0.0, 0.0); g]; 3];
    let mut pairs = 0usize;

    for_each_pair_statistics(&all, &cfg.permutation, |_, stats| {
        pairs += 1;
        let (sa, sf) = (&stats[0], &stats[1]);
        let (pa, pf) = (sa.pvalue(), sf.pvalue());
        let add = |acc: &mut (f64, f64), p: f64, w: f64| {
            acc.0 += w * (1.0 - (pf - p).abs());
            acc.1 += w * (1.0 - (pa - p).abs());
        };
        for (mi, acc) in metric_sums.iter_mut().enumerate() {
            add(acc, stats[2 + mi].pvalue(), 1.0);
        }
        let w = 1.0 / inst as f64;
        for (gi, &lambda) in cfg.grid.iter().enumerate() {
            add(&mut line_sums[0][gi], mix(lambda, sa, sf), 1.0);
            for r in 0..inst {
                add(&mut line_sums[1][gi], mix(lambda, sa, &stats[2 + m + r]), w);
                add(
                    &mut line_sums[2][gi],
                    mix(lambda, sf, &stats[2 + m + inst + r]),
                    w,
                );
            }
        }
    })?;

    let pf = pairs.max(1) as f64;
    let points = metrics
        .iter()
        .zip(&metric_sums)
        .map(|(mat, (x, y))| SPAPlanePoint {
            label: mat.name.clone(),
            x: x / pf,
            y: y / pf,
        })
        .collect();
    let lines = [
        LineKind::Tradeoff,
        LineKind::AdequacyKnowledge,
        LineKind::FluencyKnowledge,
    ]
    .into_iter()
    .zip(line_sums)
    .map(|(kind, sums)| SentinelLine {
        kind,
        instances: if kind == LineKind::Tradeoff { 1 } else { inst },
        points: cfg
            .grid
            .iter()
            .zip(sums)
            .map(|(lambda, (x, y))| SPAPlanePoint {
                label: format!("{lambda:.2}"),
                x: x / pf,
                y: y / pf,
            })
            .collect(),
    })
    .collect();
    Ok(SPAPlane {
        points,
        lines,
        pairs,
    })
}
