//! One-way ANOVA across systems: the classic equal-variance F test and
//! Welch's heteroscedastic variant.

use serde::{Deserialize, Serialize};

use super::fdist::f_sf;
use crate::data::ScoreMatrix;
use crate::error::StatsError;

/// Floor applied to ANOVA p-values.
pub const P_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnovaMethod {
    Standard,
    Welch,
}

impl std::fmt::Display for AnovaMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnovaMethod::Standard => "standard",
            AnovaMethod::Welch => "welch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub df_between: usize,
    pub df_within: f64,
    /// Right-tail p-value clamped to `[P_FLOOR, 1]`.
    pub p_value: f64,
    pub method: AnovaMethod,
    /// Set when within-system variation vanished and the sentinel
    /// (`F = inf`, `p = P_FLOOR`) was substituted.
    pub degenerate: bool,
}

impl AnovaResult {
    fn with_p(
        f: f64,
        df_between: usize,
        df_within: f64,
        method: AnovaMethod,
    ) -> Result<Self, StatsError> {
        let p = f_sf(f, df_between as f64, df_within)?;
        Ok(AnovaResult {
            f_statistic: f,
            df_between,
            df_within,
            p_value: p.clamp(P_FLOOR, 1.0),
            method,
            degenerate: false,
        })
    }

    pub fn sentinel(df_between: usize, df_within: f64, method: AnovaMethod) -> Self {
        AnovaResult {
            f_statistic: f64::INFINITY,
            df_between,
            df_within,
            p_value: P_FLOOR,
            method,
            degenerate: true,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Classic one-way ANOVA over groups of possibly unequal size.
///
/// `MSB = sum n_i (m_i - m)^2 / (K - 1)`, `MSW = sum (x - m_i)^2 / (T - K)`,
/// with `T` the total number of observations.
pub fn one_way_anova(groups: &[&[f64]]) -> Result<AnovaResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: k,
        });
    }
    if let Some(g) = groups.iter().find(|g| g.is_empty()) {
        return Err(StatsError::InsufficientData {
            required: 1,
            found: g.len(),
        });
    }
    let total: usize = groups.iter().map(|g| g.len()).sum();
    if total <= k {
        return Err(StatsError::InsufficientData {
            required: k + 1,
            found: total,
        });
    }
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total as f64;
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let ss_between: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.len() as f64 * (m - grand).powi(2))
        .sum();
    let ss_within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum();
    let df_between = k - 1;
    let df_within = (total - k) as f64;
    let msw = ss_within / df_within;
    if msw <= 0.0 {
        return Err(StatsError::DegenerateWithin);
    }
    let msb = ss_between / df_between as f64;
    AnovaResult::with_p(msb / msw, df_between, df_within, AnovaMethod::Standard)
}

/// Welch's one-way ANOVA; needs at least two observations and nonzero
/// variance in every group.
pub fn welch_anova(groups: &[&[f64]]) -> Result<AnovaResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::InsufficientData {
            required: 2,
            found: k,
        });
    }
    let mut weights = Vec::with_capacity(k);
    let mut means = Vec::with_capacity(k);
    for (i, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(StatsError::InsufficientData {
                required: 2,
                found: g.len(),
            });
        }
        let m = mean(g);
        let var = g.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (g.len() - 1) as f64;
        if var <= 0.0 {
            return Err(StatsError::ZeroVarianceSystem(i));
        }
        weights.push(g.len() as f64 / var);
        means.push(m);
    }
    let w_sum: f64 = weights.iter().sum();
    let weighted_mean = weights.iter().zip(&means).map(|(w, m)| w * m).sum::<f64>() / w_sum;
    let kf = k as f64;
    let numerator = weights
        .iter()
        .zip(&means)
        .map(|(w, m)| w * (m - weighted_mean).powi(2))
        .sum::<f64>()
        / (kf - 1.0);
    let lambda: f64 = groups
        .iter()
        .zip(&weights)
        .map(|(g, w)| (1.0 - w / w_sum).powi(2) / (g.len() - 1) as f64)
        .sum();
    let denominator = 1.0 + 2.0 * (kf - 2.0) / (kf * kf - 1.0) * lambda;
    let f = numerator / denominator;
    if lambda <= 0.0 {
        return Err(StatsError::DegenerateWithin);
    }
    let df_within = (kf * kf - 1.0) / (3.0 * lambda);
    AnovaResult::with_p(f, k - 1, df_within, AnovaMethod::Welch)
}

fn rows(matrix: &ScoreMatrix) -> Vec<&[f64]> {
    (0..matrix.num_systems()).map(|i| matrix.row(i)).collect()
}

/// Standard ANOVA with systems as groups.
pub fn f_statistic(matrix: &ScoreMatrix) -> Result<AnovaResult, StatsError> {
    one_way_anova(&rows(matrix))
}

/// Welch ANOVA with systems as groups.
pub fn welch_f_statistic(matrix: &ScoreMatrix) -> Result<AnovaResult, StatsError> {
    welch_anova(&rows(matrix))
}

/// Runs the chosen ANOVA, replacing a vanished within-system variation by
/// the documented sentinel so that pipelines always complete.
pub fn anova(matrix: &ScoreMatrix, method: AnovaMethod) -> Result<AnovaResult, StatsError> {
    let result = match method {
        AnovaMethod::Standard => f_statistic(matrix),
        AnovaMethod::Welch => welch_f_statistic(matrix),
    };
    match result {
        Err(StatsError::DegenerateWithin) => {
            let k = matrix.num_systems();
            let total = k * matrix.num_segments();
            Ok(AnovaResult::sentinel(
                k - 1,
                total.saturating_sub(k) as f64,
                method,
            ))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Orientation;

    fn m(rows: &[Vec<f64>]) -> ScoreMatrix {
        ScoreMatrix::from_rows("m", rows, Orientation::HigherBetter)
    }

    #[test]
    fn two_by_two_hand_example() {
        let r = f_statistic(&m(&[vec![0.0, 2.0], vec![4.0, 6.0]])).unwrap();
        assert_eq!(r.f_statistic, 8.0);
        assert_eq!((r.df_between, r.df_within), (1, 2.0));
        // F(1, 2) tail at 8 is 1 - sqrt(0.8)
        assert!((r.p_value - (1.0 - 0.8f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn constant_systems_are_degenerate() {
        let x = m(&[vec![3.0, 3.0], vec![3.0, 3.0]]);
        assert_eq!(f_statistic(&x), Err(StatsError::DegenerateWithin));
        let s = anova(&x, AnovaMethod::Standard).unwrap();
        assert!(s.degenerate && s.f_statistic.is_infinite());
        assert_eq!(s.p_value, P_FLOOR);
        let sep = m(&[vec![1.0, 1.0], vec![3.0, 3.0]]);
        assert_eq!(f_statistic(&sep), Err(StatsError::DegenerateWithin));
    }

    #[test]
    fn scaling_cancels() {
        let base = m(&[
            vec![0.0, 2.0, 1.0],
            vec![4.0, 6.0, 3.0],
            vec![1.0, 1.5, 0.5],
        ]);
        let scaled = base.map_oriented("s", |v| 7.3 * v);
        let a = f_statistic(&base).unwrap().f_statistic;
        let b = f_statistic(&scaled).unwrap().f_statistic;
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn welch_requires_variance() {
        assert_eq!(
            welch_f_statistic(&m(&[vec![1.0, 2.0], vec![3.0, 3.0]])),
            Err(StatsError::ZeroVarianceSystem(1))
        );
    }

    #[test]
    fn welch_matches_standard_when_balanced() {
        // Equal sizes and variances: the Welch correction term vanishes for K = 2.
        let x = m(&[vec![0.0, 2.0, 1.0], vec![4.0, 6.0, 5.0]]);
        let s = f_statistic(&x).unwrap();
        let w = welch_f_statistic(&x).unwrap();
        assert!((s.f_statistic - w.f_statistic).abs() < 1e-6);
        assert_eq!(w.method, AnovaMethod::Welch);
        // For K > 2 it shrinks like 1/n.
        let big: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                (0..20000)
                    .map(|j| i as f64 + if j % 2 == 0 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        let s = f_statistic(&m(&big)).unwrap().f_statistic;
        let w = welch_f_statistic(&m(&big)).unwrap().f_statistic;
        assert!((s - w).abs() / s < 1e-4);
    }

    #[test]
    fn unequal_group_sizes() {
        let r = one_way_anova(&[&[1.0, 2.0, 3.0], &[4.0, 6.0]]).unwrap();
        // means 2 and 5, grand 3.2; SSB = 3*1.44 + 2*3.24 = 10.8; SSW = 2 + 2 = 4
        assert!((r.f_statistic - 10.8 / (4.0 / 3.0)).abs() < 1e-12);
        assert_eq!(r.df_within, 3.0);
    }
}
