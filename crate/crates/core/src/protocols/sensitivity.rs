use serde::{Deserialize, Serialize};

use crate::data::ScoreMatrix;
use crate::error::{Error, Result};

/// How contributions of qualifying candidate pairs are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairWeighting {
    /// One mean over all qualifying pairs.
    #[default]
    Global,
    /// Mean per segment first, then over segments with at least one pair.
    SegmentMacro,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub unnormalized: f64,
    /// `None` when the metric has no spread on any segment.
    pub normalized: Option<f64>,
    pub pairs_used: usize,
}

fn pop_std(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    (xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Average metric change per unit change of `vary` over candidate pairs of
/// the same segment whose `hold` penalties are exactly equal.
///
/// All matrices are read oriented (higher is better); the contribution of
/// a pair is `(m_better - m_worse) / (v_better - v_worse)`, signed, so a
/// metric moving the wrong way contributes negatively.
pub fn sensitivity(
    metric: &ScoreMatrix,
    vary: &ScoreMatrix,
    hold: &ScoreMatrix,
    weighting: PairWeighting,
) -> Result<SensitivityResult> {
    metric.check_shape(vary)?;
    metric.check_shape(hold)?;
    let (k, n) = metric.shape();
    let (mut total, mut pairs) = (0.0, 0usize);
    let (mut macro_sum, mut macro_segments) = (0.0, 0usize);
    let (mut sigma_vary, mut sigma_metric) = (0.0, 0.0);
    for j in 0..n {
        let (mut seg_sum, mut seg_pairs) = (0.0, 0usize);
        for a in 0..k {
            for b in a + 1..k {
                if hold.get(a, j) != hold.get(b, j) {
                    continue;
                }
                let dv = vary.get(a, j) - vary.get(b, j);
                if dv == 0.0 {
                    continue;
                }
                seg_sum += (metric.get(a, j) - metric.get(b, j)) / dv;
                seg_pairs += 1;
            }
        }
        total += seg_sum;
        pairs += seg_pairs;
        if seg_pairs > 0 {
            macro_sum += seg_sum / seg_pairs as f64;
            macro_segments += 1;
        }
        sigma_vary += pop_std((0..k).map(|i| vary.get(i, j)));
        sigma_metric += pop_std((0..k).map(|i| metric.get(i, j)));
    }
    if pairs == 0 {
        return Err(Error::NoQualifyingPairs);
    }
    let unnormalized = match weighting {
        PairWeighting::Global => total / pairs as f64,
        PairWeighting::SegmentMacro => macro_sum / macro_segments as f64,
    };
    Ok(SensitivityResult {
        unnormalized,
        normalized: (sigma_metric > 0.0).then(|| unnormalized * sigma_vary / sigma_metric),
        pairs_used: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Orientation;

    fn lower(name: &str, rows: &[Vec<f64>]) -> ScoreMatrix {
        ScoreMatrix::from_rows(name, rows, Orientation::LowerBetter)
    }

    #[test]
    fn aspect_metrics_are_unit_and_zero() {
        let a = lower("a", &[vec![0.0, 5.0], vec![5.0, 5.0], vec![1.0, 0.0]]);
        let f = lower("f", &[vec![1.0, 0.0], vec![1.0, 2.0], vec![1.0, 2.0]]);
        let s = sensitivity(&a, &a, &f, PairWeighting::Global).unwrap();
        assert_eq!((s.unnormalized, s.pairs_used), (1.0, 4));
        assert_eq!(
            sensitivity(&f, &a, &f, PairWeighting::Global)
                .unwrap()
                .unnormalized,
            0.0
        );
        // fluency varies only where adequacy is held: segment 0 (a: 0,5,1 distinct) has no pairs
        let s = sensitivity(&f, &f, &a, PairWeighting::Global).unwrap();
        assert_eq!((s.unnormalized, s.pairs_used), (1.0, 1));
    }

    #[test]
    fn signed_contributions_and_weighting() {
        let v = lower("v", &[vec![0.0, 0.0], vec![1.0, 2.0]]);
        let h = lower("h", &[vec![0.0, 0.0], vec![0.0, 0.0]]);
        // metric (higher better): seg 0 moves right way by 2, seg 1 moves wrong way by 1
        let m = ScoreMatrix::from_rows(
            "m",
            &[vec![2.0, 0.0], vec![0.0, 2.0]],
            Orientation::HigherBetter,
        );
        let g = sensitivity(&m, &v, &h, PairWeighting::Global).unwrap();
        assert_eq!(g.unnormalized, (2.0 - 1.0) / 2.0);
        assert_eq!(
            sensitivity(&m, &v, &h, PairWeighting::SegmentMacro)
                .unwrap()
                .unnormalized,
            0.5
        );
        assert_eq!(
            sensitivity(&m, &h, &h, PairWeighting::Global),
            Err(Error::NoQualifyingPairs)
        );
    }
}
