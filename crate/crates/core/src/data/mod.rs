//! Domain types for MQM-annotated evaluation sets and score matrices, plus
//! the readers for the annotation and score file formats.

mod align;
mod mqm;
mod scores;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

pub use align::{align, AlignMode, Aligned};
pub use mqm::{parse_mqm_file, parse_mqm_str, to_canonical_tsv, MqmFormat, NO_ERROR_CATEGORY};
pub use scores::{parse_score_file, parse_score_json_str, parse_score_tsv_str, ScoreTable};

/// Whether larger raw values mean better translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Orientation {
    #[default]
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::HigherBetter => 1.0,
            Orientation::LowerBetter => -1.0,
        }
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "higher" | "higher-better" | "higherbetter" | "hi" => Ok(Orientation::HigherBetter),
            "lower" | "lower-better" | "lowerbetter" | "lo" => Ok(Orientation::LowerBetter),
            other => Err(format!(
                "unknown orientation `{other}` (expected higher|lower)"
            )),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::HigherBetter => "higher",
            Orientation::LowerBetter => "lower",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Major,
    Minor,
    Neutral,
}

impl Severity {
    /// Case-insensitive; `no-error` maps to `Neutral`.
    pub fn parse(token: &str) -> Option<Severity> {
        let t = token.trim().to_ascii_lowercase();
        match t.as_str() {
            "major" => Some(Severity::Major),
            "minor" => Some(Severity::Minor),
            "neutral" | "no-error" | "no error" => Some(Severity::Neutral),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Major => "major",
            Severity::Minor => "minor",
            Severity::Neutral => "neutral",
        }
    }
}

/// Character range `[start, end)` inside the candidate translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// One MQM error annotation. Field order defines the canonical sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ErrorAnnotation {
    pub system_id: String,
    pub segment_id: String,
    pub rater_id: String,
    pub doc_id: String,
    pub category: String,
    pub severity: Severity,
    pub span: Option<Span>,
}

impl ErrorAnnotation {
    pub fn is_no_error(&self) -> bool {
        self.category.trim().eq_ignore_ascii_case(NO_ERROR_CATEGORY)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub doc: String,
    pub source: String,
}

impl Segment {
    pub fn bare(id: impl Into<String>) -> Self {
        Segment {
            id: id.into(),
            doc: String::new(),
            source: String::new(),
        }
    }
}

/// Systems x segments grid of candidate translations and their annotations.
///
/// Systems and segments are kept in lexicographic id order. A cell is
/// present when at least one annotation row (possibly a no-error row)
/// was read for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSet {
    pub name: String,
    pub language_pair: String,
    systems: Vec<String>,
    segments: Vec<Segment>,
    /// Row-major `K x N`; `None` marks a missing cell.
    candidates: Vec<Option<String>>,
    annotations: Vec<ErrorAnnotation>,
}

impl EvaluationSet {
    /// Builds a set and checks shape invariants. Ids are sorted here, so the
    /// caller's order is irrelevant.
    pub fn new(
        name: impl Into<String>,
        language_pair: impl Into<String>,
        systems: Vec<String>,
        segments: Vec<Segment>,
        candidates: Vec<Option<String>>,
        mut annotations: Vec<ErrorAnnotation>,
    ) -> Result<Self, DataError> {
        let k = systems.len();
        let n = segments.len();
        if k < 2 || n < 1 {
            return Err(DataError::TooSmall {
                systems: k,
                segments: n,
            });
        }
        if candidates.len() != k * n {
            return Err(DataError::ShapeMismatch {
                expected: (k, n),
                found: (candidates.len() / n.max(1), n),
            });
        }
        let mut sys_order: Vec<usize> = (0..k).collect();
        sys_order.sort_by(|&a, &b| systems[a].cmp(&systems[b]));
        let mut seg_order: Vec<usize> = (0..n).collect();
        seg_order.sort_by(|&a, &b| segments[a].id.cmp(&segments[b].id));

        let sorted_candidates = sys_order
            .iter()
            .flat_map(|&i| seg_order.iter().map(move |&j| (i, j)))
            .map(|(i, j)| candidates[i * n + j].clone())
            .collect();
        annotations.sort();
        Ok(EvaluationSet {
            name: name.into(),
            language_pair: language_pair.into(),
            systems: sys_order.iter().map(|&i| systems[i].clone()).collect(),
            segments: seg_order.iter().map(|&j| segments[j].clone()).collect(),
            candidates: sorted_candidates,
            annotations,
        })
    }

    /// A set with every cell present but no texts or annotations; used when
    /// only score files are available.
    pub fn skeleton(
        name: impl Into<String>,
        language_pair: impl Into<String>,
        systems: Vec<String>,
        segments: Vec<String>,
    ) -> Result<Self, DataError> {
        let cells = vec![Some(String::new()); systems.len() * segments.len()];
        EvaluationSet::new(
            name,
            language_pair,
            systems,
            segments.into_iter().map(Segment::bare).collect(),
            cells,
            Vec::new(),
        )
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment_ids(&self) -> Vec<String> {
        self.segments.iter().map(|s| s.id.clone()).collect()
    }

    pub fn annotations(&self) -> &[ErrorAnnotation] {
        &self.annotations
    }

    pub fn num_systems(&self) -> usize {
        self.systems.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn candidate(&self, system: usize, segment: usize) -> Option<&str> {
        self.candidates[system * self.segments.len() + segment].as_deref()
    }

    pub fn system_index(&self, id: &str) -> Option<usize> {
        self.systems.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    pub fn segment_index(&self, id: &str) -> Option<usize> {
        self.segments
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
    }

    pub fn is_complete(&self) -> bool {
        self.candidates.iter().all(Option::is_some)
    }

    /// Segments for which every system has a candidate.
    pub fn complete_segments(&self) -> Vec<bool> {
        let n = self.segments.len();
        (0..n)
            .map(|j| (0..self.systems.len()).all(|i| self.candidates[i * n + j].is_some()))
            .collect()
    }

    /// Keeps only the segments whose flag is set.
    pub fn retain_segments(&self, keep: &[bool]) -> Result<EvaluationSet, DataError> {
        let n = self.segments.len();
        let kept: Vec<usize> = (0..n).filter(|&j| keep[j]).collect();
        let kept_ids: std::collections::BTreeSet<&str> =
            kept.iter().map(|&j| self.segments[j].id.as_str()).collect();
        let candidates = (0..self.systems.len())
            .flat_map(|i| kept.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.candidates[i * n + j].clone())
            .collect();
        let annotations = self
            .annotations
            .iter()
            .filter(|a| kept_ids.contains(a.segment_id.as_str()))
            .cloned()
            .collect();
        EvaluationSet::new(
            self.name.clone(),
            self.language_pair.clone(),
            self.systems.clone(),
            kept.iter().map(|&j| self.segments[j].clone()).collect(),
            candidates,
            annotations,
        )
    }

    /// Builds a new set whose systems are drawn from this one cell by cell:
    /// system `k` of the result takes, at segment `j`, the candidate and
    /// annotations of source system `sources[k][j]`.
    pub fn recompose(
        &self,
        new_systems: Vec<String>,
        sources: &[Vec<usize>],
    ) -> Result<EvaluationSet, DataError> {
        let n = self.segments.len();
        let mut by_cell: std::collections::BTreeMap<(usize, usize), Vec<&ErrorAnnotation>> =
            Default::default();
        for a in &self.annotations {
            if let (Some(i), Some(j)) = (
                self.system_index(&a.system_id),
                self.segment_index(&a.segment_id),
            ) {
                by_cell.entry((i, j)).or_default().push(a);
            }
        }
        let mut candidates = Vec::with_capacity(new_systems.len() * n);
        let mut annotations = Vec::new();
        for (k, row) in sources.iter().enumerate() {
            for (j, &src) in row.iter().enumerate() {
                candidates.push(self.candidates[src * n + j].clone());
                for a in by_cell.get(&(src, j)).into_iter().flatten() {
                    let mut a = (*a).clone();
                    a.system_id = new_systems[k].clone();
                    annotations.push(a);
                }
            }
        }
        EvaluationSet::new(
            self.name.clone(),
            self.language_pair.clone(),
            new_systems,
            self.segments.clone(),
            candidates,
            annotations,
        )
    }
}

/// Dense `K x N` matrix of per-(system, segment) scores.
///
/// Values are stored oriented so that higher is better; a `LowerBetter`
/// matrix holds negated raw values and [`ScoreMatrix::raw`] undoes that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub name: String,
    systems: Vec<String>,
    segments: Vec<String>,
    values: Vec<f64>,
    orientation: Orientation,
}

impl ScoreMatrix {
    /// `raw` is row-major `K x N` in the file's native orientation.
    pub fn from_raw(
        name: impl Into<String>,
        systems: Vec<String>,
        segments: Vec<String>,
        raw: Vec<f64>,
        orientation: Orientation,
    ) -> Result<Self, DataError> {
        let k = systems.len();
        let n = segments.len();
        if raw.len() != k * n {
            return Err(DataError::ShapeMismatch {
                expected: (k, n),
                found: (raw.len().checked_div(n).unwrap_or(0), n),
            });
        }
        if let Some(pos) = raw.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonNumericScore {
                line: 0,
                token: format!("{} at cell {pos}", raw[pos]),
            });
        }
        let sign = orientation.sign();
        Ok(ScoreMatrix {
            name: name.into(),
            systems,
            segments,
            values: raw.into_iter().map(|v| sign * v).collect(),
            orientation,
        })
    }

    /// Builds from already-oriented (higher is better) values.
    pub fn from_oriented(
        name: impl Into<String>,
        systems: Vec<String>,
        segments: Vec<String>,
        oriented: Vec<f64>,
        orientation: Orientation,
    ) -> Result<Self, DataError> {
        let sign = orientation.sign();
        let raw = oriented.into_iter().map(|v| sign * v).collect();
        ScoreMatrix::from_raw(name, systems, segments, raw, orientation)
    }

    /// Convenience for tests and synthetic data: rows are systems.
    pub fn from_rows(name: &str, rows: &[Vec<f64>], orientation: Orientation) -> Self {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let systems = (0..k).map(|i| format!("sys{i:03}")).collect();
        let segments = (0..n).map(|j| format!("seg{j:05}")).collect();
        let raw = rows.iter().flatten().copied().collect();
        ScoreMatrix::from_raw(name, systems, segments, raw, orientation)
            .expect("rows must be rectangular and finite")
    }

    pub fn num_systems(&self) -> usize {
        self.systems.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.systems.len(), self.segments.len())
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Oriented value (higher is better).
    pub fn get(&self, system: usize, segment: usize) -> f64 {
        self.values[system * self.segments.len() + segment]
    }

    /// Oriented row for one system.
    pub fn row(&self, system: usize) -> &[f64] {
        let n = self.segments.len();
        &self.values[system * n..(system + 1) * n]
    }

    /// Raw value in the file's native orientation.
    pub fn raw(&self, system: usize, segment: usize) -> f64 {
        self.orientation.sign() * self.get(system, segment)
    }

    pub fn oriented_values(&self) -> &[f64] {
        &self.values
    }

    pub fn raw_values(&self) -> Vec<f64> {
        let sign = self.orientation.sign();
        self.values.iter().map(|v| sign * v).collect()
    }

    pub fn same_shape(&self, other: &ScoreMatrix) -> bool {
        self.shape() == other.shape()
    }

    pub fn check_shape(&self, other: &ScoreMatrix) -> Result<(), DataError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(DataError::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            })
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Applies `f` to each oriented value, keeping ids and orientation.
    pub fn map_oriented(&self, name: &str, f: impl Fn(f64) -> f64) -> ScoreMatrix {
        ScoreMatrix {
            name: name.to_string(),
            systems: self.systems.clone(),
            segments: self.segments.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            orientation: self.orientation,
        }
    }

    /// Re-indexes systems: row `k` of the result at segment `j` is this
    /// matrix's row `sources[k][j]`.
    pub fn recompose(&self, new_systems: Vec<String>, sources: &[Vec<usize>]) -> ScoreMatrix {
        let n = self.segments.len();
        let values = sources
            .iter()
            .flat_map(|row| row.iter().enumerate().map(move |(j, &src)| src * n + j))
            .map(|idx| self.values[idx])
            .collect();
        ScoreMatrix {
            name: self.name.clone(),
            systems: new_systems,
            segments: self.segments.clone(),
            values,
            orientation: self.orientation,
        }
    }

    /// Reorders systems to lexicographic id order.
    pub fn sorted_by_system(&self) -> ScoreMatrix {
        let mut order: Vec<usize> = (0..self.systems.len()).collect();
        order.sort_by(|&a, &b| self.systems[a].cmp(&self.systems[b]));
        let n = self.segments.len();
        let sources: Vec<Vec<usize>> = order.iter().map(|&i| vec![i; n]).collect();
        let names = order.iter().map(|&i| self.systems[i].clone()).collect();
        self.recompose(names, &sources)
    }
}

/// An unordered pair of system indices, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SystemPair {
    i: usize,
    j: usize,
}

impl SystemPair {
    pub fn new(i: usize, j: usize) -> Option<SystemPair> {
        (i < j).then_some(SystemPair { i, j })
    }

    pub fn i(self) -> usize {
        self.i
    }

    pub fn j(self) -> usize {
        self.j
    }

    /// All `K(K-1)/2` pairs in lexicographic order.
    pub fn all(k: usize) -> impl Iterator<Item = SystemPair> {
        (0..k).flat_map(move |i| (i + 1..k).map(move |j| SystemPair { i, j }))
    }
}
