//! Rank-based synthesized systems and the composed meta-evaluation setups
//! built from them.
//!
//! Synthesized system `k` takes, at every segment, the candidate ranked
//! `k`-th on one aspect. Every score matrix is re-indexed through the same
//! per-segment assignment, so synthesized systems carry the MQM and metric
//! scores of the candidates they borrowed.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{EvaluationSet, ScoreMatrix};
use crate::error::{Error, Result};
use crate::scoring::MqmScores;
use crate::stats::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Adequacy,
    Fluency,
}

impl Axis {
    fn id_prefix(self) -> &'static str {
        match self {
            Axis::Adequacy => "synthA#",
            Axis::Fluency => "synthF#",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Adequacy => "adequacy",
            Axis::Fluency => "fluency",
        })
    }
}

/// Per-segment rank assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedSet {
    pub axis: Axis,
    pub source_systems: Vec<String>,
    /// `assignment[k][j]`: source system of rank `k + 1` at segment `j`.
    pub assignment: Vec<Vec<usize>>,
}

impl SynthesizedSet {
    /// `synthA#01`, ... zero-padded so that lexicographic order is rank
    /// order.
    pub fn system_ids(&self) -> Vec<String> {
        let k = self.assignment.len();
        let width = k.to_string().len().max(2);
        (1..=k)
            .map(|r| format!("{}{:0width$}", self.axis.id_prefix(), r))
            .collect()
    }

    pub fn apply(&self, matrix: &ScoreMatrix) -> ScoreMatrix {
        matrix.recompose(self.system_ids(), &self.assignment)
    }
}

/// Ranks the candidates of every segment by `axis_scores` (best first).
/// Ties are broken by a shuffle seeded from `(tie_seed, axis, segment)`
/// applied before a stable sort.
pub fn synthesize(axis_scores: &ScoreMatrix, axis: Axis, tie_seed: u64) -> Result<SynthesizedSet> {
    let (k, n) = axis_scores.shape();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "synthesis needs at least 2 systems, got {k}"
        )));
    }
    let axis_name = axis.to_string();
    let mut assignment = vec![vec![0usize; n]; k];
    let mut order: Vec<usize> = Vec::with_capacity(k);
    for (j, seg) in axis_scores.segments().iter().enumerate() {
        order.clear();
        order.extend(0..k);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(tie_seed, &["synth", &axis_name, seg]));
        order.shuffle(&mut rng);
        // oriented values: higher is better, so descending puts the lowest penalty first
        order.sort_by(|&a, &b| axis_scores.get(b, j).total_cmp(&axis_scores.get(a, j)));
        for (rank, &src) in order.iter().enumerate() {
            assignment[rank][j] = src;
        }
    }
    Ok(SynthesizedSet {
        axis,
        source_systems: axis_scores.systems().to_vec(),
        assignment,
    })
}

/// Which system sets a meta-evaluation setup includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupSpec {
    pub include_original: bool,
    pub include_synth_adequacy: bool,
    pub include_synth_fluency: bool,
    pub tie_seed: u64,
}

impl SetupSpec {
    pub fn new(
        original: bool,
        synth_adequacy: bool,
        synth_fluency: bool,
        tie_seed: u64,
    ) -> Result<SetupSpec> {
        if !(original || synth_adequacy || synth_fluency) {
            return Err(Error::InvalidArgument(
                "a setup needs at least one system set".into(),
            ));
        }
        Ok(SetupSpec {
            include_original: original,
            include_synth_adequacy: synth_adequacy,
            include_synth_fluency: synth_fluency,
            tie_seed,
        })
    }

    pub fn original(tie_seed: u64) -> SetupSpec {
        SetupSpec::new(true, false, false, tie_seed).expect("one flag set")
    }

    /// The balanced setup: both synthesized sets, no original systems.
    pub fn balanced(tie_seed: u64) -> SetupSpec {
        SetupSpec::new(false, true, true, tie_seed).expect("two flags set")
    }

    /// The seven flag combinations in the conventional row order.
    pub fn rows(tie_seed: u64) -> Vec<SetupSpec> {
        [
            (true, false, false),
            (false, true, false),
            (false, false, true),
            (true, true, false),
            (true, false, true),
            (false, true, true),
            (true, true, true),
        ]
        .into_iter()
        .map(|(o, a, f)| SetupSpec::new(o, a, f, tie_seed).expect("nonempty row"))
        .collect()
    }

    pub fn num_sets(&self) -> usize {
        [
            self.include_original,
            self.include_synth_adequacy,
            self.include_synth_fluency,
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }

    /// Comma-separated form accepted by [`SetupSpec::parse`].
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.include_original {
            parts.push("original");
        }
        if self.include_synth_adequacy {
            parts.push("synth-adequacy");
        }
        if self.include_synth_fluency {
            parts.push("synth-fluency");
        }
        parts.join(",")
    }

    /// Parses `original,synth-adequacy,synth-fluency` (any subset, any
    /// order; `orig`, `synthA`/`a`, `synthF`/`f` are accepted too).
    pub fn parse(text: &str, tie_seed: u64) -> Result<SetupSpec> {
        let (mut o, mut a, mut f) = (false, false, false);
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().replace('_', "-").as_str() {
                "original" | "orig" | "o" => o = true,
                "synth-adequacy" | "syntha" | "a" | "adequacy" => a = true,
                "synth-fluency" | "synthf" | "f" | "fluency" => f = true,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown system set `{other}`"
                    )))
                }
            }
        }
        SetupSpec::new(o, a, f, tie_seed)
    }
}

impl fmt::Display for SetupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for SetupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SetupSpec::parse(s, 0)
    }
}

/// A composed setup: `K' = K x (number of sets)` systems in lexicographic
/// id order.
#[derive(Debug, Clone)]
pub struct Setup {
    pub spec: SetupSpec,
    pub set: EvaluationSet,
    pub mqm: MqmScores,
    pub externals: Vec<ScoreMatrix>,
    /// `sources[k][j]`: original system index behind cell `(k, j)`.
    pub sources: Vec<Vec<usize>>,
}

pub fn build_setup(
    set: &EvaluationSet,
    spec: &SetupSpec,
    mqm: &MqmScores,
    externals: &[ScoreMatrix],
) -> Result<Setup> {
    let k = set.num_systems();
    let n = set.num_segments();
    for m in [&mqm.adequacy, &mqm.fluency, &mqm.other, &mqm.all]
        .into_iter()
        .chain(externals)
    {
        if m.shape() != (k, n) {
            return Err(crate::error::DataError::ShapeMismatch {
                expected: (k, n),
                found: m.shape(),
            }
            .into());
        }
    }

    let mut rows: Vec<(String, Vec<usize>)> = Vec::with_capacity(k * spec.num_sets());
    if spec.include_original {
        rows.extend(
            set.systems()
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), vec![i; n])),
        );
    }
    for (flag, axis, scores) in [
        (spec.include_synth_adequacy, Axis::Adequacy, &mqm.adequacy),
        (spec.include_synth_fluency, Axis::Fluency, &mqm.fluency),
    ] {
        if flag {
            let s = synthesize(scores, axis, spec.tie_seed)?;
            rows.extend(s.system_ids().into_iter().zip(s.assignment));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument(format!(
            "system id `{}` collides with a synthesized id",
            w[0].0
        )));
    }
    let (ids, sources): (Vec<String>, Vec<Vec<usize>>) = rows.into_iter().unzip();

    Ok(Setup {
        spec: *spec,
        set: set.recompose(ids.clone(), &sources)?,
        mqm: mqm.recompose(ids.clone(), &sources),
        externals: externals
            .iter()
            .map(|m| m.recompose(ids.clone(), &sources))
            .collect(),
        sources,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Orientation;

    fn lower(rows: &[Vec<f64>]) -> ScoreMatrix {
        ScoreMatrix::from_rows("x", rows, Orientation::LowerBetter)
    }

    #[test]
    fn two_systems_rank_by_penalty() {
        let m = lower(&[vec![3.0], vec![1.0]]);
        let s = synthesize(&m, Axis::Adequacy, 0).unwrap();
        assert_eq!(s.assignment, vec![vec![1], vec![0]]);
        assert_eq!(s.system_ids(), vec!["synthA#01", "synthA#02"]);
    }

    #[test]
    fn ties_are_seeded() {
        let m = lower(&vec![vec![2.0; 40]; 5]);
        let a = synthesize(&m, Axis::Fluency, 11).unwrap();
        assert_eq!(a, synthesize(&m, Axis::Fluency, 11).unwrap());
        assert_ne!(a, synthesize(&m, Axis::Fluency, 12).unwrap());
        for j in 0..40 {
            let mut col: Vec<usize> = a.assignment.iter().map(|r| r[j]).collect();
            col.sort();
            assert_eq!(col, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn synthesized_columns_are_sorted() {
        let m = lower(&[
            vec![0.0, 5.0, 1.0],
            vec![2.0, 0.0, 1.0],
            vec![1.0, 1.0, 25.0],
        ]);
        let s = synthesize(&m, Axis::Adequacy, 3).unwrap();
        let out = s.apply(&m);
        for j in 0..3 {
            for r in 1..3 {
                assert!(out.raw(r - 1, j) <= out.raw(r, j));
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let s = SetupSpec::parse("original, synth-adequacy,synth-fluency", 0).unwrap();
        assert_eq!(s.num_sets(), 3);
        assert_eq!(s.label(), "original,synth-adequacy,synth-fluency");
        assert!(SetupSpec::parse("", 0).is_err());
        assert!(SetupSpec::parse("bogus", 0).is_err());
        assert_eq!(SetupSpec::rows(0)[5], SetupSpec::balanced(0));
    }
}
