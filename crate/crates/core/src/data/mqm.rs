use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{ErrorAnnotation, EvaluationSet, Segment, Severity, Span};
use crate::error::DataError;

/// Category token marking a row that records "no errors found".
pub const NO_ERROR_CATEGORY: &str = "No-error";

const REQUIRED: [&str; 8] = [
    "system", "doc", "seg_id", "rater", "source", "target", "category", "severity",
];

const SPAN_OPEN: &str = "<v>";
const SPAN_CLOSE: &str = "</v>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MqmFormat {
    /// Tab-separated unless the file extension is `.csv`.
    #[default]
    Auto,
    Tsv,
    Csv,
}

impl MqmFormat {
    fn delimiter(self, path: Option<&Path>) -> u8 {
        match self {
            MqmFormat::Tsv => b'\t',
            MqmFormat::Csv => b',',
            MqmFormat::Auto => match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some(ext) if ext.eq_ignore_ascii_case("csv") => b',',
                _ => b'\t',
            },
        }
    }
}

pub fn parse_mqm_file(path: &Path, format: MqmFormat) -> Result<EvaluationSet, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("mqm")
        .to_string();
    let lp = language_pair_from_name(&name).unwrap_or_default();
    let mut set = parse_delimited(&text, format.delimiter(Some(path)), &name)?;
    if set.language_pair.is_empty() {
        set.language_pair = lp;
    }
    Ok(set)
}

/// Parses tab-separated MQM annotations from memory.
pub fn parse_mqm_str(text: &str, name: &str) -> Result<EvaluationSet, DataError> {
    parse_delimited(text, b'\t', name)
}

/// Accumulated per-cell data while reading rows.
#[derive(Default)]
struct CellAcc {
    candidate: Option<String>,
}

fn parse_delimited(text: &str, delimiter: u8, name: &str) -> Result<EvaluationSet, DataError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(DataError::EmptyFile(name.to_string()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .quoting(false)
        .flexible(true)
        .has_headers(true)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| DataError::Syntax {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let find = |col: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(col))
    };
    let mut idx = [0usize; REQUIRED.len()];
    for (slot, col) in idx.iter_mut().zip(REQUIRED) {
        // WMT releases name the document column either `doc` or `doc_id`.
        let found = find(col).or_else(|| (col == "doc").then(|| find("doc_id")).flatten());
        *slot = found.ok_or_else(|| DataError::MissingColumn {
            column: col.to_string(),
            source_name: name.to_string(),
        })?;
    }
    let [c_sys, c_doc, c_seg, c_rater, c_src, c_tgt, c_cat, c_sev] = idx;
    let c_lp = find("lp").or_else(|| find("language_pair"));

    let mut cells: BTreeMap<(String, String), CellAcc> = BTreeMap::new();
    let mut segments: BTreeMap<String, Segment> = BTreeMap::new();
    let mut systems: BTreeSet<String> = BTreeSet::new();
    let mut annotations = Vec::new();
    let mut language_pairs: BTreeSet<String> = BTreeSet::new();

    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2;
        let record = record.map_err(|e| DataError::Syntax {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let field = |c: usize| record.get(c).unwrap_or("").trim_end_matches('\r');
        let system = field(c_sys).trim().to_string();
        let seg_id = field(c_seg).trim().to_string();
        if system.is_empty() || seg_id.is_empty() {
            return Err(DataError::Syntax {
                line,
                message: "empty system or seg_id".into(),
            });
        }
        let category = field(c_cat).trim().to_string();
        if category.is_empty() {
            return Err(DataError::EmptyCategory { line });
        }
        let no_error = category.eq_ignore_ascii_case(NO_ERROR_CATEGORY);
        let sev_token = field(c_sev);
        let severity = match Severity::parse(sev_token) {
            Some(s) => s,
            None => {
                return Err(DataError::MalformedSeverity {
                    line,
                    token: sev_token.to_string(),
                })
            }
        };
        let severity = if no_error {
            Severity::Neutral
        } else {
            severity
        };
        let (candidate, span) = strip_span_markers(field(c_tgt));
        let (source, _) = strip_span_markers(field(c_src));
        let doc = field(c_doc).trim().to_string();

        if let Some(c) = c_lp {
            let lp = field(c).trim();
            if !lp.is_empty() {
                language_pairs.insert(lp.to_string());
            }
        }

        systems.insert(system.clone());
        // Texts that disagree across rows resolve to the smallest so the
        // result does not depend on row order.
        let seg = segments.entry(seg_id.clone()).or_insert_with(|| Segment {
            id: seg_id.clone(),
            doc: doc.clone(),
            source: source.clone(),
        });
        if doc < seg.doc {
            seg.doc = doc.clone();
        }
        if source < seg.source {
            seg.source = source;
        }
        let cell = cells.entry((system.clone(), seg_id.clone())).or_default();
        match &cell.candidate {
            Some(c) if *c <= candidate => {}
            _ => cell.candidate = Some(candidate),
        }

        annotations.push(ErrorAnnotation {
            system_id: system,
            segment_id: seg_id,
            rater_id: field(c_rater).trim().to_string(),
            doc_id: doc,
            category: if no_error {
                NO_ERROR_CATEGORY.to_string()
            } else {
                category
            },
            severity,
            span,
        });
    }

    if annotations.is_empty() {
        return Err(DataError::EmptyFile(name.to_string()));
    }
    for a in &mut annotations {
        a.doc_id = segments[&a.segment_id].doc.clone();
    }

    let systems: Vec<String> = systems.into_iter().collect();
    let segments: Vec<Segment> = segments.into_values().collect();
    let candidates = systems
        .iter()
        .flat_map(|s| segments.iter().map(move |g| (s, g)))
        .map(|(s, g)| {
            cells
                .get(&(s.clone(), g.id.clone()))
                .and_then(|c| c.candidate.clone())
        })
        .collect();
    let language_pair = if language_pairs.len() == 1 {
        language_pairs.into_iter().next().unwrap_or_default()
    } else {
        String::new()
    };
    EvaluationSet::new(
        name,
        language_pair,
        systems,
        segments,
        candidates,
        annotations,
    )
}

/// Removes `<v>`/`</v>` span markers, returning the clean text and the
/// character range of the first marked region.
fn strip_span_markers(text: &str) -> (String, Option<Span>) {
    if !text.contains(SPAN_OPEN) && !text.contains(SPAN_CLOSE) {
        return (text.to_string(), None);
    }
    let mut out = String::with_capacity(text.len());
    let mut chars = 0usize;
    let mut start = None;
    let mut span = None;
    let mut rest = text;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix(SPAN_OPEN) {
            if start.is_none() && span.is_none() {
                start = Some(chars);
            }
            rest = r;
        } else if let Some(r) = rest.strip_prefix(SPAN_CLOSE) {
            if let (Some(s), None) = (start, span) {
                span = Some(Span {
                    start: s,
                    end: chars,
                });
            }
            rest = r;
        } else {
            let c = rest.chars().next().expect("non-empty");
            out.push(c);
            chars += 1;
            rest = &rest[c.len_utf8()..];
        }
    }
    (out, span)
}

fn insert_span_markers(text: &str, span: Option<Span>) -> String {
    let Some(span) = span else {
        return text.to_string();
    };
    let mut out = String::with_capacity(text.len() + 7);
    let mut n = 0;
    for c in text.chars() {
        if n == span.start {
            out.push_str(SPAN_OPEN);
        }
        if n == span.end {
            out.push_str(SPAN_CLOSE);
        }
        out.push(c);
        n += 1;
    }
    if n <= span.start {
        out.push_str(SPAN_OPEN);
    }
    if n <= span.end {
        out.push_str(SPAN_CLOSE);
    }
    out
}

/// Serializes to the TSV layout read by [`parse_mqm_str`], one row per
/// annotation in canonical order. A non-empty language pair adds an `lp`
/// column so it survives the round trip.
pub fn to_canonical_tsv(set: &EvaluationSet) -> String {
    let lp = (!set.language_pair.is_empty()).then_some(set.language_pair.as_str());
    let mut out = REQUIRED.join("\t");
    if lp.is_some() {
        out.push_str("\tlp");
    }
    out.push('\n');
    for a in set.annotations() {
        let (Some(i), Some(j)) = (
            set.system_index(&a.system_id),
            set.segment_index(&a.segment_id),
        ) else {
            continue;
        };
        let seg = &set.segments()[j];
        let target = insert_span_markers(set.candidate(i, j).unwrap_or(""), a.span);
        let row = [
            a.system_id.as_str(),
            seg.doc.as_str(),
            seg.id.as_str(),
            a.rater_id.as_str(),
            seg.source.as_str(),
            target.as_str(),
            a.category.as_str(),
            a.severity.as_str(),
        ];
        out.push_str(&row.join("\t"));
        if let Some(lp) = lp {
            out.push('\t');
            out.push_str(lp);
        }
        out.push('\n');
    }
    out
}

/// Guesses a language pair such as `en-es` from a WMT-style file stem
/// (`mqm_generalMT2024_enes`).
pub(crate) fn language_pair_from_name(stem: &str) -> Option<String> {
    let lower = stem.to_ascii_lowercase();
    let wmt_style = lower.starts_with("mqm");
    lower.split(['_', '.', ' ']).rev().find_map(|tok| {
        let b = tok.as_bytes();
        if wmt_style && b.len() == 4 && b.iter().all(u8::is_ascii_alphabetic) {
            Some(format!("{}-{}", &tok[..2], &tok[2..]))
        } else if b.len() == 5
            && b[2] == b'-'
            && b[..2].iter().chain(&b[3..]).all(u8::is_ascii_alphabetic)
        {
            Some(tok.to_string())
        } else {
            None
        }
    })
}
