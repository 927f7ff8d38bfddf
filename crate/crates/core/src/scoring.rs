//! MQM penalty weighting, the adequacy/fluency error taxonomies, and the
//! aggregation of annotations into All/Adequacy/Fluency/Other matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{ErrorAnnotation, EvaluationSet, Orientation, ScoreMatrix, Severity};
use crate::error::DataError;

const DEFAULT_TAXONOMY: &str = include_str!("../data/taxonomy_default.txt");
const EN_ES_TAXONOMY: &str = include_str!("../data/taxonomy_en_es.txt");

/// Penalty points per error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub major: f64,
    pub minor: f64,
    pub neutral: f64,
    pub non_translation: f64,
    pub minor_punctuation: f64,
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme {
            major: 5.0,
            minor: 1.0,
            neutral: 0.0,
            non_translation: 25.0,
            minor_punctuation: 0.1,
        }
    }
}

impl WeightScheme {
    pub fn validate(&self) -> Result<(), DataError> {
        let all = [
            self.major,
            self.minor,
            self.neutral,
            self.non_translation,
            self.minor_punctuation,
        ];
        let bad = |message: String| Err(DataError::Syntax { line: 0, message });
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return bad("weights must be finite and non-negative".into());
        }
        if !(self.major >= self.minor && self.minor >= self.neutral) {
            return bad(format!(
                "weights must satisfy major >= minor >= neutral, got {} / {} / {}",
                self.major, self.minor, self.neutral
            ));
        }
        Ok(())
    }

    /// Reads `key = value` lines (`#` comments). Unset keys keep defaults.
    pub fn parse(text: &str) -> Result<WeightScheme, DataError> {
        let mut w = WeightScheme::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| DataError::Syntax {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                })?;
            let value: f64 = value.trim().parse().map_err(|_| DataError::Syntax {
                line: line_no,
                message: format!("`{}` is not a number", value.trim()),
            })?;
            let slot = match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
                "major" => &mut w.major,
                "minor" => &mut w.minor,
                "neutral" => &mut w.neutral,
                "non_translation" => &mut w.non_translation,
                "minor_punctuation" => &mut w.minor_punctuation,
                other => {
                    return Err(DataError::Syntax {
                        line: line_no,
                        message: format!("unknown weight `{other}`"),
                    })
                }
            };
            *slot = value;
        }
        w.validate()?;
        Ok(w)
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "major={} minor={} neutral={} non_translation={} minor_punctuation={}",
            self.major, self.minor, self.neutral, self.non_translation, self.minor_punctuation
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AspectClass {
    Adequacy,
    Fluency,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaxonomyName {
    Default,
    EnEs,
    Custom(String),
}

impl fmt::Display for TaxonomyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaxonomyName::Default => f.write_str("default"),
            TaxonomyName::EnEs => f.write_str("en-es"),
            TaxonomyName::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// Partition of MQM category paths into adequacy, fluency and other.
/// Category keys are stored normalized (see [`normalize_category`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    pub name: TaxonomyName,
    adequacy: BTreeSet<String>,
    fluency: BTreeSet<String>,
    other: BTreeSet<String>,
}

impl Taxonomy {
    /// Categorization used for En-De, Ja-Zh and Zh-En.
    pub fn default_taxonomy() -> Taxonomy {
        Taxonomy::parse(DEFAULT_TAXONOMY, TaxonomyName::Default).expect("bundled taxonomy")
    }

    /// Categorization used for En-Es.
    pub fn en_es() -> Taxonomy {
        Taxonomy::parse(EN_ES_TAXONOMY, TaxonomyName::EnEs).expect("bundled taxonomy")
    }

    /// En-Es sets get their own taxonomy; everything else the default.
    pub fn for_language_pair(lp: &str) -> Taxonomy {
        let key: String = lp
            .to_ascii_lowercase()
            .chars()
            .filter(char::is_ascii_alphabetic)
            .collect();
        if key == "enes" {
            Taxonomy::en_es()
        } else {
            Taxonomy::default_taxonomy()
        }
    }

    /// Builds from explicit category lists; fails if they overlap.
    pub fn from_sets<S: AsRef<str>>(
        name: TaxonomyName,
        adequacy: &[S],
        fluency: &[S],
        other: &[S],
    ) -> Result<Taxonomy, DataError> {
        let mut t = Taxonomy {
            name,
            adequacy: BTreeSet::new(),
            fluency: BTreeSet::new(),
            other: BTreeSet::new(),
        };
        for (class, cats) in [
            (AspectClass::Adequacy, adequacy),
            (AspectClass::Fluency, fluency),
            (AspectClass::Other, other),
        ] {
            for c in cats {
                t.insert(class, c.as_ref(), 0)?;
            }
        }
        Ok(t)
    }

    fn insert(&mut self, class: AspectClass, category: &str, line: usize) -> Result<(), DataError> {
        let key = normalize_category(category);
        if self.adequacy.contains(&key) || self.fluency.contains(&key) || self.other.contains(&key)
        {
            return Err(DataError::Syntax {
                line,
                message: format!("category `{category}` listed more than once"),
            });
        }
        match class {
            AspectClass::Adequacy => self.adequacy.insert(key),
            AspectClass::Fluency => self.fluency.insert(key),
            AspectClass::Other => self.other.insert(key),
        };
        Ok(())
    }

    /// Reads one category path per line under `ADEQUACY`, `FLUENCY` and
    /// `OTHER` headers. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, name: TaxonomyName) -> Result<Taxonomy, DataError> {
        let mut t = Taxonomy {
            name,
            adequacy: BTreeSet::new(),
            fluency: BTreeSet::new(),
            other: BTreeSet::new(),
        };
        let mut current = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let header = line
                .trim_end_matches(':')
                .trim_matches(|c| c == '[' || c == ']');
            // headers are upper case so that a category named "Other" stays a category
            match header {
                "ADEQUACY" => current = Some(AspectClass::Adequacy),
                "FLUENCY" => current = Some(AspectClass::Fluency),
                "OTHER" => current = Some(AspectClass::Other),
                _ => {
                    let class = current.ok_or_else(|| DataError::Syntax {
                        line: line_no,
                        message: "category before any ADEQUACY/FLUENCY/OTHER header".into(),
                    })?;
                    t.insert(class, line, line_no)?;
                }
            }
        }
        if t.adequacy.is_empty() && t.fluency.is_empty() && t.other.is_empty() {
            return Err(DataError::EmptyFile("taxonomy".into()));
        }
        Ok(t)
    }

    /// Lookup by normalized category; `None` for categories not listed.
    pub fn lookup(&self, category: &str) -> Option<AspectClass> {
        let key = normalize_category(category);
        if self.adequacy.contains(&key) {
            Some(AspectClass::Adequacy)
        } else if self.fluency.contains(&key) {
            Some(AspectClass::Fluency)
        } else if self.other.contains(&key) {
            Some(AspectClass::Other)
        } else {
            None
        }
    }

    pub fn categories(&self, class: AspectClass) -> impl Iterator<Item = &str> {
        match class {
            AspectClass::Adequacy => &self.adequacy,
            AspectClass::Fluency => &self.fluency,
            AspectClass::Other => &self.other,
        }
        .iter()
        .map(String::as_str)
    }
}

/// Lowercases, trims, collapses whitespace runs and drops spaces around `/`.
pub fn normalize_category(category: &str) -> String {
    let collapsed = category.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed
        .split('/')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join("/")
        .to_lowercase()
}

/// Unknown categories fall into `Other`.
pub fn classify_error(category: &str, taxonomy: &Taxonomy) -> AspectClass {
    taxonomy.lookup(category).unwrap_or(AspectClass::Other)
}

fn is_non_translation(key: &str) -> bool {
    key.trim_end_matches('!') == "non-translation"
}

fn is_punctuation(key: &str) -> bool {
    key == "fluency/punctuation" || key == "punctuation"
}

/// Penalty points for one annotation. Neutral is always free; a
/// non-translation costs `non_translation` whatever its severity; minor
/// punctuation errors get the reduced weight.
pub fn error_penalty(annotation: &ErrorAnnotation, weights: &WeightScheme) -> f64 {
    let key = normalize_category(&annotation.category);
    match annotation.severity {
        Severity::Neutral => weights.neutral,
        _ if is_non_translation(&key) => weights.non_translation,
        Severity::Minor if is_punctuation(&key) => weights.minor_punctuation,
        Severity::Minor => weights.minor,
        Severity::Major => weights.major,
    }
}

/// The four penalty matrices of one evaluation set (all `LowerBetter`).
#[derive(Debug, Clone)]
pub struct MqmScores {
    pub all: ScoreMatrix,
    pub adequacy: ScoreMatrix,
    pub fluency: ScoreMatrix,
    pub other: ScoreMatrix,
    /// Categories not found in the taxonomy, with occurrence counts.
    pub unknown_categories: BTreeMap<String, usize>,
}

impl MqmScores {
    /// Builds from pre-computed raw penalty matrices (e.g. score files),
    /// deriving All as the elementwise sum.
    pub fn from_aspects(
        adequacy: ScoreMatrix,
        fluency: ScoreMatrix,
        other: Option<ScoreMatrix>,
    ) -> Result<MqmScores, DataError> {
        adequacy.check_shape(&fluency)?;
        let other = match other {
            Some(o) => {
                adequacy.check_shape(&o)?;
                o
            }
            None => adequacy.map_oriented("other", |_| 0.0),
        };
        let raw: Vec<f64> = adequacy
            .raw_values()
            .iter()
            .zip(fluency.raw_values())
            .zip(other.raw_values())
            .map(|((a, f), o)| a + f + o)
            .collect();
        let all = ScoreMatrix::from_raw(
            "all",
            adequacy.systems().to_vec(),
            adequacy.segments().to_vec(),
            raw,
            Orientation::LowerBetter,
        )?;
        Ok(MqmScores {
            all,
            adequacy: adequacy.renamed("adequacy"),
            fluency: fluency.renamed("fluency"),
            other: other.renamed("other"),
            unknown_categories: BTreeMap::new(),
        })
    }

    /// Applies the same cell re-indexing to all four matrices.
    pub fn recompose(&self, new_systems: Vec<String>, sources: &[Vec<usize>]) -> MqmScores {
        MqmScores {
            all: self.all.recompose(new_systems.clone(), sources),
            adequacy: self.adequacy.recompose(new_systems.clone(), sources),
            fluency: self.fluency.recompose(new_systems.clone(), sources),
            other: self.other.recompose(new_systems, sources),
            unknown_categories: self.unknown_categories.clone(),
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Penalties {
    all: f64,
    adequacy: f64,
    fluency: f64,
    other: f64,
}

/// Sums penalties per rater within each cell, then averages over the raters
/// who rated that cell (a rater with only no-error rows contributes zero).
pub fn mqm_matrices(
    set: &EvaluationSet,
    weights: &WeightScheme,
    taxonomy: &Taxonomy,
) -> Result<MqmScores, DataError> {
    let k = set.num_systems();
    let n = set.num_segments();
    for i in 0..k {
        for j in 0..n {
            if set.candidate(i, j).is_none() {
                return Err(DataError::UnalignedIds {
                    matrix: set.name.clone(),
                    system: set.systems()[i].clone(),
                    segment: set.segments()[j].id.clone(),
                });
            }
        }
    }

    let mut per_rater: BTreeMap<(usize, usize, &str), Penalties> = BTreeMap::new();
    let mut unknown: BTreeMap<String, usize> = BTreeMap::new();
    for a in set.annotations() {
        let (Some(i), Some(j)) = (
            set.system_index(&a.system_id),
            set.segment_index(&a.segment_id),
        ) else {
            continue;
        };
        let acc = per_rater.entry((i, j, a.rater_id.as_str())).or_default();
        if a.is_no_error() {
            continue;
        }
        let class = match taxonomy.lookup(&a.category) {
            Some(c) => c,
            None => {
                *unknown.entry(a.category.clone()).or_default() += 1;
                AspectClass::Other
            }
        };
        let p = error_penalty(a, weights);
        acc.all += p;
        match class {
            AspectClass::Adequacy => acc.adequacy += p,
            AspectClass::Fluency => acc.fluency += p,
            AspectClass::Other => acc.other += p,
        }
    }
    if !unknown.is_empty() {
        log::warn!(
            "{}: {} annotation(s) with categories outside taxonomy `{}` counted as Other: {:?}",
            set.name,
            unknown.values().sum::<usize>(),
            taxonomy.name,
            unknown.keys().collect::<Vec<_>>()
        );
    }

    let mut sums = vec![Penalties::default(); k * n];
    let mut raters = vec![0usize; k * n];
    for ((i, j, _), p) in per_rater {
        let cell = &mut sums[i * n + j];
        cell.all += p.all;
        cell.adequacy += p.adequacy;
        cell.fluency += p.fluency;
        cell.other += p.other;
        raters[i * n + j] += 1;
    }
    let mean = |f: fn(&Penalties) -> f64| -> Vec<f64> {
        sums.iter()
            .zip(&raters)
            .map(|(p, &r)| if r == 0 { 0.0 } else { f(p) / r as f64 })
            .collect()
    };
    let systems = set.systems().to_vec();
    let segments = set.segment_ids();
    let build = |name: &str, raw: Vec<f64>| {
        ScoreMatrix::from_raw(
            name,
            systems.clone(),
            segments.clone(),
            raw,
            Orientation::LowerBetter,
        )
    };
    Ok(MqmScores {
        all: build("all", mean(|p| p.all))?,
        adequacy: build("adequacy", mean(|p| p.adequacy))?,
        fluency: build("fluency", mean(|p| p.fluency))?,
        other: build("other", mean(|p| p.other))?,
        unknown_categories: unknown,
    })
}

/// Per-system mean over segments, in the matrix's oriented values.
pub fn system_means(matrix: &ScoreMatrix) -> Vec<f64> {
    let n = matrix.num_segments() as f64;
    (0..matrix.num_systems())
        .map(|i| matrix.row(i).iter().sum::<f64>() / n)
        .collect()
}

/// Per-system mean of raw (file-orientation) values.
pub fn raw_system_means(matrix: &ScoreMatrix) -> Vec<f64> {
    let sign = match matrix.orientation() {
        Orientation::HigherBetter => 1.0,
        Orientation::LowerBetter => -1.0,
    };
    system_means(matrix).into_iter().map(|m| sign * m).collect()
}
