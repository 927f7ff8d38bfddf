use super::{EvaluationSet, ScoreMatrix, ScoreTable};
use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignMode {
    /// Any missing cell is an error.
    Strict,
    /// Segments missing in any input are removed.
    #[default]
    DropIncomplete,
}

#[derive(Debug, Clone)]
pub struct Aligned {
    pub set: EvaluationSet,
    pub matrices: Vec<ScoreMatrix>,
    /// Ids of the segments removed in `DropIncomplete` mode.
    pub dropped_segments: Vec<String>,
}

/// Aligns score tables to an evaluation set so that every returned matrix
/// has the set's `K x N` shape and id order. Score cells for systems or
/// segments that the set does not know are ignored.
pub fn align(
    set: &EvaluationSet,
    tables: &[ScoreTable],
    mode: AlignMode,
) -> Result<Aligned, DataError> {
    let k = set.num_systems();
    let n = set.num_segments();
    let mut keep = vec![true; n];
    let mut first_gap: Option<DataError> = None;

    for (j, complete) in set.complete_segments().into_iter().enumerate() {
        if !complete {
            keep[j] = false;
            if first_gap.is_none() {
                let i = (0..k).find(|&i| set.candidate(i, j).is_none()).unwrap_or(0);
                first_gap = Some(DataError::UnalignedIds {
                    matrix: set.name.clone(),
                    system: set.systems()[i].clone(),
                    segment: set.segments()[j].id.clone(),
                });
            }
        }
    }
    for table in tables {
        for (j, seg) in set.segments().iter().enumerate() {
            for system in set.systems() {
                if table.get(system, &seg.id).is_none() {
                    keep[j] = false;
                    if first_gap.is_none() {
                        first_gap = Some(DataError::UnalignedIds {
                            matrix: table.name.clone(),
                            system: system.clone(),
                            segment: seg.id.clone(),
                        });
                    }
                    break;
                }
            }
        }
    }

    if let Some(err) = first_gap {
        if mode == AlignMode::Strict || !keep.iter().any(|&k| k) {
            return Err(err);
        }
    }

    let dropped_segments: Vec<String> = set
        .segments()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| !k)
        .map(|(s, _)| s.id.clone())
        .collect();
    let set = if dropped_segments.is_empty() {
        set.clone()
    } else {
        log::warn!(
            "{}: dropped {} incomplete segment(s)",
            set.name,
            dropped_segments.len()
        );
        set.retain_segments(&keep)?
    };
    let segment_ids = set.segment_ids();
    let matrices = tables
        .iter()
        .map(|t| t.to_matrix(set.systems(), &segment_ids))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Aligned {
        set,
        matrices,
        dropped_segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_score_tsv_str, Orientation};

    fn set() -> EvaluationSet {
        EvaluationSet::skeleton(
            "t",
            "en-de",
            vec!["A".into(), "B".into()],
            vec!["1".into(), "2".into()],
        )
        .unwrap()
    }

    fn table(text: &str) -> ScoreTable {
        parse_score_tsv_str(text, "m", Orientation::HigherBetter).unwrap()
    }

    #[test]
    fn complete_inputs_are_unchanged() {
        let t = table("system\tseg_id\tscore\nA\t1\t1\nA\t2\t2\nB\t1\t3\nB\t2\t4\n");
        for mode in [AlignMode::Strict, AlignMode::DropIncomplete] {
            let out = align(&set(), std::slice::from_ref(&t), mode).unwrap();
            assert_eq!(out.set, set());
            assert!(out.dropped_segments.is_empty());
            assert_eq!(out.matrices[0].shape(), (2, 2));
        }
    }

    #[test]
    fn drop_incomplete_removes_segment() {
        let t = table("system\tseg_id\tscore\nA\t1\t1\nA\t2\t2\nB\t1\t3\n");
        let out = align(&set(), std::slice::from_ref(&t), AlignMode::DropIncomplete).unwrap();
        assert_eq!(out.set.num_segments(), 1);
        assert_eq!(out.dropped_segments, ["2"]);
        assert_eq!(out.matrices[0].shape(), (2, 1));

        match align(&set(), &[t], AlignMode::Strict) {
            Err(DataError::UnalignedIds {
                system, segment, ..
            }) => {
                assert_eq!((system.as_str(), segment.as_str()), ("B", "2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nothing_left_is_an_error() {
        let t = table("system\tseg_id\tscore\nA\t1\t1\n");
        assert!(align(&set(), &[t], AlignMode::DropIncomplete).is_err());
    }
}
