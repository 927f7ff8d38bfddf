use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::Value;

use super::{Orientation, ScoreMatrix};
use crate::error::DataError;

/// Scores read from a file, keyed by `(system, segment)`. Possibly sparse;
/// [`ScoreTable::to_matrix`] densifies against a chosen id order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub name: String,
    pub orientation: Orientation,
    cells: BTreeMap<(String, String), f64>,
}

impl ScoreTable {
    pub fn new(name: impl Into<String>, orientation: Orientation) -> Self {
        ScoreTable {
            name: name.into(),
            orientation,
            cells: BTreeMap::new(),
        }
    }

    /// Inserts a raw score; rejects duplicates and non-finite values.
    pub fn insert(
        &mut self,
        system: &str,
        segment: &str,
        score: f64,
        line: usize,
    ) -> Result<(), DataError> {
        if !score.is_finite() {
            return Err(DataError::NonNumericScore {
                line,
                token: score.to_string(),
            });
        }
        let key = (system.to_string(), segment.to_string());
        if self.cells.contains_key(&key) {
            return Err(DataError::DuplicateCell {
                system: key.0,
                segment: key.1,
                source_name: self.name.clone(),
            });
        }
        self.cells.insert(key, score);
        Ok(())
    }

    pub fn get(&self, system: &str, segment: &str) -> Option<f64> {
        self.cells
            .get(&(system.to_string(), segment.to_string()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn systems(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.cells.keys().map(|(s, _)| s).collect();
        set.into_iter().cloned().collect()
    }

    pub fn segments(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.cells.keys().map(|(_, g)| g).collect();
        set.into_iter().cloned().collect()
    }

    /// Dense matrix over the given ids; fails on the first absent cell.
    pub fn to_matrix(
        &self,
        systems: &[String],
        segments: &[String],
    ) -> Result<ScoreMatrix, DataError> {
        let mut raw = Vec::with_capacity(systems.len() * segments.len());
        for s in systems {
            for g in segments {
                raw.push(self.get(s, g).ok_or_else(|| DataError::UnalignedIds {
                    matrix: self.name.clone(),
                    system: s.clone(),
                    segment: g.clone(),
                })?);
            }
        }
        ScoreMatrix::from_raw(
            self.name.clone(),
            systems.to_vec(),
            segments.to_vec(),
            raw,
            self.orientation,
        )
    }

    /// Dense matrix over the table's own ids.
    pub fn to_own_matrix(&self) -> Result<ScoreMatrix, DataError> {
        self.to_matrix(&self.systems(), &self.segments())
    }

    pub fn from_matrix(m: &ScoreMatrix) -> ScoreTable {
        let mut t = ScoreTable::new(m.name.clone(), m.orientation());
        for (i, s) in m.systems().iter().enumerate() {
            for (j, g) in m.segments().iter().enumerate() {
                t.cells.insert((s.clone(), g.clone()), m.raw(i, j));
            }
        }
        t
    }

    /// Writes the `system\tseg_id\tscore` layout.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("system\tseg_id\tscore\n");
        for ((s, g), v) in &self.cells {
            out.push_str(&format!("{s}\t{g}\t{v}\n"));
        }
        out
    }
}

/// Reads a TSV (`system`, `seg_id`, `score` columns) or JSON array score
/// file. JSON is detected by extension or a leading `[`.
pub fn parse_score_file(path: &Path, orientation: Orientation) -> Result<ScoreTable, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scores")
        .to_string();
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    if is_json {
        parse_score_json_str(&text, &name, orientation)
    } else {
        parse_score_tsv_str(&text, &name, orientation)
    }
}

pub fn parse_score_tsv_str(
    text: &str,
    name: &str,
    orientation: Orientation,
) -> Result<ScoreTable, DataError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| DataError::EmptyFile(name.to_string()))?;
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    let find = |c: &str| {
        cols.iter()
            .position(|h| h.eq_ignore_ascii_case(c))
            .ok_or_else(|| DataError::MissingColumn {
                column: c.to_string(),
                source_name: name.to_string(),
            })
    };
    let (c_sys, c_seg, c_score) = (find("system")?, find("seg_id")?, find("score")?);

    let mut table = ScoreTable::new(name, orientation);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        let get = |c: usize| {
            fields
                .get(c)
                .map(|f| f.trim())
                .ok_or_else(|| DataError::Syntax {
                    line: line_no,
                    message: format!("expected at least {} fields", c + 1),
                })
        };
        let (system, segment, token) = (get(c_sys)?, get(c_seg)?, get(c_score)?);
        if system.is_empty() || segment.is_empty() {
            return Err(DataError::Syntax {
                line: line_no,
                message: "empty system or seg_id".into(),
            });
        }
        let score = parse_number(token, line_no)?;
        table.insert(system, segment, score, line_no)?;
    }
    if table.is_empty() {
        return Err(DataError::EmptyFile(name.to_string()));
    }
    Ok(table)
}

pub fn parse_score_json_str(
    text: &str,
    name: &str,
    orientation: Orientation,
) -> Result<ScoreTable, DataError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DataError::Syntax {
        line: e.line(),
        message: e.to_string(),
    })?;
    let Value::Array(items) = value else {
        return Err(DataError::Syntax {
            line: 1,
            message: "expected a JSON array of {system, seg_id, score} objects".into(),
        });
    };
    let mut table = ScoreTable::new(name, orientation);
    for (idx, item) in items.iter().enumerate() {
        let entry = idx + 1;
        let field = |key: &str| {
            item.get(key).ok_or_else(|| DataError::MissingColumn {
                column: key.to_string(),
                source_name: format!("{name} (entry {entry})"),
            })
        };
        let id = |v: &Value| match v {
            Value::String(s) => Ok(s.trim().to_string()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(DataError::Syntax {
                line: entry,
                message: format!("id must be a string or number, got {other}"),
            }),
        };
        let system = id(field("system")?)?;
        let segment = id(field("seg_id")?)?;
        let score = match field("score")? {
            Value::Number(n) => n.as_f64().ok_or_else(|| DataError::NonNumericScore {
                line: entry,
                token: n.to_string(),
            })?,
            Value::String(s) => parse_number(s, entry)?,
            other => {
                return Err(DataError::NonNumericScore {
                    line: entry,
                    token: other.to_string(),
                })
            }
        };
        table.insert(&system, &segment, score, entry)?;
    }
    if table.is_empty() {
        return Err(DataError::EmptyFile(name.to_string()));
    }
    Ok(table)
}

fn parse_number(token: &str, line: usize) -> Result<f64, DataError> {
    match token.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DataError::NonNumericScore {
            line,
            token: token.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_tsv() {
        let text = "system\tseg_id\tscore\nB\t2\t4\nA\t1\t1.5\nA\t2\t2\nB\t1\t3\n";
        let t = parse_score_tsv_str(text, "m", Orientation::HigherBetter).unwrap();
        let m = t.to_own_matrix().unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m.row(0), [1.5, 2.0]);
        assert_eq!(m.row(1), [3.0, 4.0]);
    }

    #[test]
    fn duplicate_cell_is_rejected() {
        let text = "system\tseg_id\tscore\nA\t1\t1\nA\t1\t2\n";
        assert!(matches!(
            parse_score_tsv_str(text, "m", Orientation::HigherBetter),
            Err(DataError::DuplicateCell { ref system, ref segment, .. }) if system == "A" && segment == "1"
        ));
    }

    #[test]
    fn nan_and_garbage_are_rejected() {
        for bad in ["NaN", "inf", "-inf", "abc", ""] {
            let text = format!("system\tseg_id\tscore\nA\t1\t{bad}\n");
            assert!(
                matches!(
                    parse_score_tsv_str(&text, "m", Orientation::HigherBetter),
                    Err(DataError::NonNumericScore { .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn json_layout() {
        let text =
            r#"[{"system":"A","seg_id":1,"score":0.5},{"system":"B","seg_id":"1","score":"0.25"}]"#;
        let t = parse_score_json_str(text, "m", Orientation::LowerBetter).unwrap();
        let m = t.to_own_matrix().unwrap();
        assert_eq!(m.raw(0, 0), 0.5);
        assert_eq!(m.get(1, 0), -0.25);
        let nan = r#"[{"system":"A","seg_id":1,"score":"NaN"}]"#;
        assert!(matches!(
            parse_score_json_str(nan, "m", Orientation::HigherBetter),
            Err(DataError::NonNumericScore { .. })
        ));
    }

    #[test]
    fn lower_better_is_negated_but_raw_is_kept() {
        let text = "system\tseg_id\tscore\nA\t1\t3\nB\t1\t1\n";
        let m = parse_score_tsv_str(text, "mqm", Orientation::LowerBetter)
            .unwrap()
            .to_own_matrix()
            .unwrap();
        assert_eq!(m.get(0, 0), -3.0);
        assert_eq!(m.raw(0, 0), 3.0);
        assert_eq!(ScoreTable::from_matrix(&m).get("A", "1"), Some(3.0));
    }
}
