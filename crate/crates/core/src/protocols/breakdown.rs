use serde::{Deserialize, Serialize};

use crate::data::{ScoreMatrix, SystemPair};
use crate::error::Result;
use crate::meta::pair_sign;
use crate::scoring::system_means;

/// How a metric orders the pairs on which adequacy and fluency disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordantBreakdown {
    pub agree_adequacy: f64,
    pub agree_fluency: f64,
    pub metric_tie_fraction: f64,
    pub agree_adequacy_count: usize,
    pub agree_fluency_count: usize,
    pub metric_tie_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PABreakdown {
    /// PA on concordant pairs; `None` when there are none.
    pub pa_concordant: Option<f64>,
    pub concordant_pairs: usize,
    pub concordant_agree: usize,
    pub discordant_pairs: usize,
    /// Pairs tied on at least one aspect; they belong to neither bucket.
    pub tied_pairs: usize,
    /// `None` when there are no discordant pairs.
    pub discordant: Option<DiscordantBreakdown>,
}

pub fn pa_breakdown(
    metric: &ScoreMatrix,
    adequacy: &ScoreMatrix,
    fluency: &ScoreMatrix,
) -> Result<PABreakdown> {
    metric.check_shape(adequacy)?;
    metric.check_shape(fluency)?;
    Ok(pa_breakdown_means(
        &system_means(metric),
        &system_means(adequacy),
        &system_means(fluency),
    ))
}

pub fn pa_breakdown_means(metric: &[f64], adequacy: &[f64], fluency: &[f64]) -> PABreakdown {
    let (mut conc, mut conc_agree, mut disc, mut tied) = (0, 0, 0, 0);
    let (mut agree_a, mut agree_f, mut ties) = (0, 0, 0);
    for pair in SystemPair::all(metric.len()) {
        let a = pair_sign(adequacy, pair);
        let f = pair_sign(fluency, pair);
        let m = pair_sign(metric, pair);
        match a * f {
            1 => {
                conc += 1;
                if m == a {
                    conc_agree += 1;
                }
            }
            -1 => {
                disc += 1;
                if m == 0 {
                    ties += 1;
                } else if m == a {
                    agree_a += 1;
                } else {
                    agree_f += 1;
                }
            }
            _ => tied += 1,
        }
    }
    let frac = |c: usize| c as f64 / disc as f64;
    PABreakdown {
        pa_concordant: (conc > 0).then(|| conc_agree as f64 / conc as f64),
        concordant_pairs: conc,
        concordant_agree: conc_agree,
        discordant_pairs: disc,
        tied_pairs: tied,
        discordant: (disc > 0).then(|| DiscordantBreakdown {
            agree_adequacy: frac(agree_a),
            agree_fluency: frac(agree_f),
            metric_tie_fraction: frac(ties),
            agree_adequacy_count: agree_a,
            agree_fluency_count: agree_f,
            metric_tie_count: ties,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aspect_metrics_side_with_their_aspect() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let f = [4.0, 1.0, 2.0, 3.0];
        let b = pa_breakdown_means(&a, &a, &f);
        let d = b.discordant.unwrap();
        assert_eq!(
            (d.agree_adequacy, d.agree_fluency, d.metric_tie_fraction),
            (1.0, 0.0, 0.0)
        );
        assert_eq!(b.pa_concordant, Some(1.0));
        let d = pa_breakdown_means(&f, &a, &f).discordant.unwrap();
        assert_eq!(d.agree_fluency, 1.0);
        assert_eq!(b.concordant_pairs + b.discordant_pairs + b.tied_pairs, 6);
    }

    #[test]
    fn metric_ties_are_separate() {
        let a = [1.0, 2.0];
        let f = [2.0, 1.0];
        let d = pa_breakdown_means(&[5.0, 5.0], &a, &f).discordant.unwrap();
        assert_eq!(d.metric_tie_fraction, 1.0);
        assert!(pa_breakdown_means(&a, &a, &a).discordant.is_none());
    }
}
