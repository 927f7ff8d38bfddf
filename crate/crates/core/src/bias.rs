//! Extrinsic adequacy/fluency bias of a system set, measured through the
//! ANOVA p-values of the two aspect scores.

use serde::{Deserialize, Serialize};

use crate::data::ScoreMatrix;
use crate::error::Result;
use crate::stats::{anova, AnovaMethod, AnovaResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dominance {
    A,
    F,
    None,
}

impl std::fmt::Display for Dominance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Dominance::A => "A",
            Dominance::F => "F",
            Dominance::None => "-",
        })
    }
}

impl Dominance {
    /// `delta_p = p_adequacy - p_fluency`: a smaller adequacy p-value means
    /// the systems are better separated by adequacy, so a negative
    /// difference is tagged `A`.
    pub fn from_delta_p(delta_p: f64) -> Dominance {
        if delta_p < 0.0 {
            Dominance::A
        } else if delta_p > 0.0 {
            Dominance::F
        } else {
            Dominance::None
        }
    }
}

/// Logarithm used inside the B transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Base(f64),
}

/// `B = 1 / (1 - log|dp|)`, mapping `|dp|` in `[0, 1]` to `[0, 1]`; 0 for
/// `dp = 0`.
pub fn b_transform(delta_p: f64) -> f64 {
    b_transform_with_base(delta_p, LogBase::Natural)
}

pub fn b_transform_with_base(delta_p: f64, base: LogBase) -> f64 {
    let m = delta_p.abs();
    if m == 0.0 {
        return 0.0;
    }
    let log = match base {
        LogBase::Natural => m.ln(),
        LogBase::Base(b) => m.ln() / b.ln(),
    };
    (1.0 / (1.0 - log)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub adequacy: AnovaResult,
    pub fluency: AnovaResult,
    pub delta_p: f64,
    pub b_value: f64,
    pub dominant: Dominance,
}

impl BiasReport {
    pub fn from_anova(adequacy: AnovaResult, fluency: AnovaResult) -> BiasReport {
        let delta_p = adequacy.p_value - fluency.p_value;
        BiasReport {
            adequacy,
            fluency,
            delta_p,
            b_value: b_transform(delta_p),
            dominant: Dominance::from_delta_p(delta_p),
        }
    }
}

/// Runs the chosen ANOVA on both aspects and compares their p-values.
pub fn bias_report(
    adequacy: &ScoreMatrix,
    fluency: &ScoreMatrix,
    method: AnovaMethod,
) -> Result<BiasReport> {
    adequacy.check_shape(fluency)?;
    Ok(BiasReport::from_anova(
        anova(adequacy, method)?,
        anova(fluency, method)?,
    ))
}
