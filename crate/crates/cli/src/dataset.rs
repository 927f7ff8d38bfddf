//! Loading evaluation sets from MQM annotation files or score directories.

use std::path::{Path, PathBuf};

use log::warn;
use mqmeta::data::{
    align, parse_mqm_file, parse_score_file, AlignMode, EvaluationSet, MqmFormat, Orientation,
    ScoreMatrix, ScoreTable,
};
use mqmeta::scoring::{mqm_matrices, MqmScores};

use crate::config::{MetricSpec, RunConfig};
use crate::error::{CliError, Result};

/// One evaluation set with its human and metric scores, all aligned.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub set: EvaluationSet,
    pub mqm: MqmScores,
    pub metrics: Vec<ScoreMatrix>,
}

fn load_metric(spec: &MetricSpec) -> Result<ScoreTable> {
    let mut t = parse_score_file(&spec.path, spec.orientation)?;
    t.name = spec.name.clone();
    Ok(t)
}

fn align_mode(cfg: &RunConfig) -> AlignMode {
    if cfg.strict {
        AlignMode::Strict
    } else {
        AlignMode::DropIncomplete
    }
}

fn report_dropped(name: &str, dropped: &[String]) {
    if !dropped.is_empty() {
        warn!("{name}: dropped {} incomplete segment(s)", dropped.len());
    }
}

pub fn load_mqm(path: &Path, cfg: &RunConfig, metrics: &[MetricSpec]) -> Result<Dataset> {
    let set = parse_mqm_file(path, MqmFormat::Auto)?;
    let taxonomy = cfg.taxonomy.resolve(&set.language_pair)?;
    let tables = metrics
        .iter()
        .map(load_metric)
        .collect::<Result<Vec<_>>>()?;
    let aligned = align(&set, &tables, align_mode(cfg))?;
    report_dropped(&set.name, &aligned.dropped_segments);
    let mqm = mqm_matrices(&aligned.set, &cfg.weights, &taxonomy)?;
    for (category, count) in &mqm.unknown_categories {
        warn!(
            "{}: unknown category `{category}` ({count}x) scored as Other",
            set.name
        );
    }
    Ok(Dataset {
        name: set.name.clone(),
        set: aligned.set,
        mqm,
        metrics: aligned.matrices,
    })
}

fn find_score_file(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["tsv", "json"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

/// Metric files under `dir/metrics`, sorted by name; a `.lower` stem suffix
/// marks error-like scores.
fn metric_files(dir: &Path) -> Result<Vec<MetricSpec>> {
    let mdir = dir.join("metrics");
    if !mdir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(&mdir).map_err(|e| CliError::io(&mdir, e))? {
        let path = entry.map_err(|e| CliError::io(&mdir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !path.is_file() || !(ext == "tsv" || ext == "json") {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let (name, orientation) = match stem.strip_suffix(".lower") {
            Some(n) => (n.to_string(), Orientation::LowerBetter),
            None => (stem, Orientation::HigherBetter),
        };
        out.push(MetricSpec {
            name,
            path,
            orientation,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// A directory with `adequacy.tsv`, `fluency.tsv`, optional `other.tsv`
/// (penalties, lower is better) and optional `metrics/*.tsv`.
pub fn load_dir(dir: &Path, cfg: &RunConfig, extra: &[MetricSpec]) -> Result<Dataset> {
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());
    let required = |stem: &str| {
        find_score_file(dir, stem)
            .ok_or_else(|| CliError::Usage(format!("{} has no {stem}.tsv", dir.display())))
    };
    let read = |path: &Path, stem: &str| -> Result<ScoreTable> {
        let mut t = parse_score_file(path, Orientation::LowerBetter)?;
        t.name = stem.to_string();
        Ok(t)
    };
    let adequacy = read(&required("adequacy")?, "adequacy")?;
    let fluency = read(&required("fluency")?, "fluency")?;
    let other = find_score_file(dir, "other")
        .map(|p| read(&p, "other"))
        .transpose()?;

    let mut specs = metric_files(dir)?;
    specs.extend_from_slice(extra);
    let skeleton =
        EvaluationSet::skeleton(name.clone(), "", adequacy.systems(), adequacy.segments())?;
    let mut tables = vec![adequacy, fluency];
    let has_other = other.is_some();
    tables.extend(other);
    for s in &specs {
        tables.push(load_metric(s)?);
    }
    let aligned = align(&skeleton, &tables, align_mode(cfg))?;
    report_dropped(&name, &aligned.dropped_segments);
    let mut matrices = aligned.matrices.into_iter();
    let adequacy = matrices.next().expect("adequacy aligned");
    let fluency = matrices.next().expect("fluency aligned");
    let other = if has_other { matrices.next() } else { None };
    Ok(Dataset {
        name,
        set: aligned.set,
        mqm: MqmScores::from_aspects(adequacy, fluency, other)?,
        metrics: matrices.collect(),
    })
}

/// Loads every configured input. Metric files given with `--metric` are
/// only allowed with a single input.
pub fn load_all(cfg: &RunConfig) -> Result<Vec<Dataset>> {
    let inputs = cfg.mqm.len() + cfg.data.len();
    if inputs == 0 {
        return Err(CliError::Usage(
            "no input: pass --mqm FILE or --data DIR".into(),
        ));
    }
    if inputs > 1 && !cfg.metrics.is_empty() {
        return Err(CliError::Usage(
            "--metric needs a single input; put per-set metrics under DIR/metrics/".into(),
        ));
    }
    let mut out = Vec::with_capacity(inputs);
    for p in &cfg.mqm {
        out.push(load_mqm(p, cfg, &cfg.metrics)?);
    }
    for d in &cfg.data {
        out.push(load_dir(d, cfg, &cfg.metrics)?);
    }
    Ok(out)
}

/// Writes a dataset directory readable by [`load_dir`].
pub fn write_dir(
    dir: &Path,
    adequacy: &ScoreMatrix,
    fluency: &ScoreMatrix,
    other: Option<&ScoreMatrix>,
    metrics: &[ScoreMatrix],
) -> Result<()> {
    let put = |path: PathBuf, m: &ScoreMatrix| {
        crate::report::write_atomic(&path, ScoreTable::from_matrix(m).to_tsv().as_bytes())
    };
    put(dir.join("adequacy.tsv"), adequacy)?;
    put(dir.join("fluency.tsv"), fluency)?;
    if let Some(o) = other {
        put(dir.join("other.tsv"), o)?;
    }
    for m in metrics {
        let suffix = match m.orientation() {
            Orientation::LowerBetter => ".lower",
            Orientation::HigherBetter => "",
        };
        put(
            dir.join("metrics").join(format!("{}{suffix}.tsv", m.name)),
            m,
        )?;
    }
    Ok(())
}
