//! Subcommand implementations. Each command loads its inputs, computes one
//! or more tables, and writes them under the output directory.

use std::path::PathBuf;

use log::{info, warn};
use mqmeta::bias::{b_transform, bias_report, Dominance};
use mqmeta::data::ScoreMatrix;
use mqmeta::meta::{concordance_counts, pairwise_accuracy, soft_pairwise_accuracy_many};
use mqmeta::protocols::{pa_breakdown, sensitivity, spa_plane, LineKind, SpaPlaneConfig};
use mqmeta::scoring::raw_system_means;
use mqmeta::stats::{AnovaMethod, PermutationConfig};
use mqmeta::synth::{build_setup, Setup, SetupSpec};

use crate::config::{Aggregate, RunConfig};
use crate::dataset::{load_all, write_dir, Dataset};
use crate::error::Result;
use crate::generate::{generate, SyntheticSpec};
use crate::report::{num, write_atomic, ReportMeta, Table};
use crate::svg::{breakdown_svg, spa_plane_svg, PlaneLine};

pub const METAEVAL_COLUMNS: &[&str] =
    &["set", "setup", "metric", "pa", "spa", "pa_rank", "spa_rank"];
pub const BIAS_COLUMNS: &[&str] = &[
    "set",
    "setup",
    "method",
    "systems",
    "f_adequacy",
    "p_adequacy",
    "f_fluency",
    "p_fluency",
    "delta_p",
    "b",
    "dominant",
    "concordant",
    "discordant",
    "tied",
];
pub const BREAKDOWN_COLUMNS: &[&str] = &[
    "set",
    "setup",
    "metric",
    "concordant_pairs",
    "pa_concordant",
    "discordant_pairs",
    "agree_adequacy",
    "agree_fluency",
    "metric_tie_fraction",
    "tied_pairs",
];
pub const SPA_PLANE_COLUMNS: &[&str] = &["set", "setup", "series", "label", "x", "y"];
pub const SENSITIVITY_COLUMNS: &[&str] = &[
    "set",
    "setup",
    "metric",
    "axis",
    "unnormalized",
    "normalized",
    "pairs_used",
];
pub const SCORE_COLUMNS: &[&str] = &["system", "seg_id", "all", "adequacy", "fluency", "other"];
pub const SYSTEM_MEANS_COLUMNS: &[&str] = &["system", "all", "adequacy", "fluency", "other"];

fn permutation(cfg: &RunConfig) -> Result<PermutationConfig> {
    Ok(PermutationConfig::new(cfg.resamples, cfg.seed)?)
}

fn setup_labels(setups: &[SetupSpec]) -> String {
    setups
        .iter()
        .map(SetupSpec::label)
        .collect::<Vec<_>>()
        .join(";")
}

fn file_label(spec: &SetupSpec) -> String {
    spec.label().replace(',', "+")
}

pub fn setups(ds: &Dataset, specs: &[SetupSpec]) -> Result<Vec<Setup>> {
    specs
        .iter()
        .map(|s| Ok(build_setup(&ds.set, s, &ds.mqm, &ds.metrics)?))
        .collect()
}

/// The MQM aspects followed by the external metrics, with report labels.
fn labelled(setup: &Setup) -> Vec<(String, &ScoreMatrix)> {
    let mut out = vec![
        ("all-mqm".to_string(), &setup.mqm.all),
        ("adequacy-mqm".to_string(), &setup.mqm.adequacy),
        ("fluency-mqm".to_string(), &setup.mqm.fluency),
    ];
    out.extend(setup.externals.iter().map(|m| (m.name.clone(), m)));
    out
}

/// Per setup, per row key, the values collected from each evaluation set.
type PerSetup<K, V> = Vec<Vec<(K, Vec<V>)>>;
/// Two optional values and the set's pair count (the micro weight).
type TwoWeighted = (Option<f64>, Option<f64>, f64);

fn num_pairs(setup: &Setup) -> f64 {
    let k = setup.set.num_systems() as f64;
    k * (k - 1.0) / 2.0
}

/// Mean of the present values, weighted by the set's pair count in micro
/// mode.
fn combine(values: &[(Option<f64>, f64)], mode: Aggregate) -> Option<f64> {
    let (mut sum, mut weight) = (0.0, 0.0);
    for &(v, pairs) in values {
        if let Some(v) = v.filter(|v| v.is_finite()) {
            let w = match mode {
                Aggregate::Macro => 1.0,
                Aggregate::Micro => pairs,
            };
            sum += w * v;
            weight += w;
        }
    }
    (weight > 0.0).then(|| sum / weight)
}

/// Competition ranks (1 = best; ties share the smaller rank).
fn ranks(values: &[Option<f64>]) -> Vec<Option<usize>> {
    values
        .iter()
        .map(|v| v.map(|x| 1 + values.iter().flatten().filter(|&&y| y > x).count()))
        .collect()
}

fn rank_str(r: Option<usize>) -> String {
    r.map_or(String::new(), |r| r.to_string())
}

// ---------------------------------------------------------------- score

pub fn score_tables(ds: &Dataset) -> (Table, Table) {
    let m = &ds.mqm;
    let mut seg = Table::new(SCORE_COLUMNS);
    for (i, sys) in m.all.systems().iter().enumerate() {
        for (j, sid) in m.all.segments().iter().enumerate() {
            seg.push(vec![
                sys.clone(),
                sid.clone(),
                num(Some(m.all.raw(i, j))),
                num(Some(m.adequacy.raw(i, j))),
                num(Some(m.fluency.raw(i, j))),
                num(Some(m.other.raw(i, j))),
            ]);
        }
    }
    let means: Vec<Vec<f64>> = [&m.all, &m.adequacy, &m.fluency, &m.other]
        .iter()
        .map(|x| raw_system_means(x))
        .collect();
    let mut sys = Table::new(SYSTEM_MEANS_COLUMNS);
    for (i, s) in m.all.systems().iter().enumerate() {
        let mut row = vec![s.clone()];
        row.extend(means.iter().map(|c| num(Some(c[i]))));
        sys.push(row);
    }
    (seg, sys)
}

pub fn cmd_score(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let meta = ReportMeta::new("score", cfg, "");
    let mut written = Vec::new();
    for ds in load_all(cfg)? {
        let (seg, sys) = score_tables(&ds);
        for (t, suffix) in [(seg, "scores"), (sys, "system_means")] {
            let p = cfg.out_dir.join(format!("{}_{suffix}.csv", ds.name));
            t.write(&p, &meta)?;
            written.push(p);
        }
    }
    Ok(written)
}

// ---------------------------------------------------------------- metaeval

pub fn metaeval_table(datasets: &[Dataset], specs: &[SetupSpec], cfg: &RunConfig) -> Result<Table> {
    let perm = permutation(cfg)?;
    let mut table = Table::new(METAEVAL_COLUMNS);
    // (setup, metric) -> per-set (pa, spa, pairs)
    let mut agg: PerSetup<String, TwoWeighted> = vec![Vec::new(); specs.len()];
    for ds in datasets {
        for (si, setup) in setups(ds, specs)?.iter().enumerate() {
            let metrics = labelled(setup);
            let mats: Vec<&ScoreMatrix> = metrics.iter().map(|(_, m)| *m).collect();
            let human = &setup.mqm.all;
            let pa: Vec<Option<f64>> = mats
                .iter()
                .map(|m| match pairwise_accuracy(m, human) {
                    Ok(r) => Some(r.value),
                    Err(mqmeta::Error::NoUsablePairs) => None,
                    Err(e) => {
                        warn!("{}: PA failed: {e}", ds.name);
                        None
                    }
                })
                .collect();
            let spa: Vec<Option<f64>> = soft_pairwise_accuracy_many(&mats, human, &perm)?
                .into_iter()
                .map(|r| Some(r.value))
                .collect();
            push_metaeval_rows(&mut table, &ds.name, &setup.spec, &metrics, &pa, &spa);
            let pairs = num_pairs(setup);
            for (mi, (name, _)) in metrics.iter().enumerate() {
                let slot = match agg[si].iter_mut().find(|(n, _)| n == name) {
                    Some(s) => s,
                    None => {
                        agg[si].push((name.clone(), Vec::new()));
                        agg[si].last_mut().expect("just pushed")
                    }
                };
                slot.1.push((pa[mi], spa[mi], pairs));
            }
        }
    }
    if datasets.len() > 1 {
        for (si, spec) in specs.iter().enumerate() {
            let labels: Vec<String> = agg[si].iter().map(|(n, _)| n.clone()).collect();
            let pa: Vec<Option<f64>> = agg[si]
                .iter()
                .map(|(_, v)| {
                    combine(
                        &v.iter().map(|x| (x.0, x.2)).collect::<Vec<_>>(),
                        cfg.aggregate,
                    )
                })
                .collect();
            let spa: Vec<Option<f64>> = agg[si]
                .iter()
                .map(|(_, v)| {
                    combine(
                        &v.iter().map(|x| (x.1, x.2)).collect::<Vec<_>>(),
                        cfg.aggregate,
                    )
                })
                .collect();
            let pa_r = ranks(&pa);
            let spa_r = ranks(&spa);
            for (mi, name) in labels.iter().enumerate() {
                table.push(vec![
                    cfg.aggregate.to_string(),
                    spec.label(),
                    name.clone(),
                    num(pa[mi]),
                    num(spa[mi]),
                    rank_str(pa_r[mi]),
                    rank_str(spa_r[mi]),
                ]);
            }
        }
    }
    Ok(table)
}

fn push_metaeval_rows(
    table: &mut Table,
    set: &str,
    spec: &SetupSpec,
    metrics: &[(String, &ScoreMatrix)],
    pa: &[Option<f64>],
    spa: &[Option<f64>],
) {
    let pa_r = ranks(pa);
    let spa_r = ranks(spa);
    for (mi, (name, _)) in metrics.iter().enumerate() {
        table.push(vec![
            set.to_string(),
            spec.label(),
            name.clone(),
            num(pa[mi]),
            num(spa[mi]),
            rank_str(pa_r[mi]),
            rank_str(spa_r[mi]),
        ]);
    }
}

pub fn cmd_metaeval(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = cfg.setups_or(vec![
        SetupSpec::original(cfg.seed),
        SetupSpec::balanced(cfg.seed),
    ]);
    let datasets = load_all(cfg)?;
    let table = metaeval_table(&datasets, &specs, cfg)?;
    let p = cfg.out_dir.join("metaeval.csv");
    table.write(&p, &ReportMeta::new("metaeval", cfg, &setup_labels(&specs)))?;
    Ok(vec![p])
}

// ---------------------------------------------------------------- bias

pub fn bias_table(datasets: &[Dataset], specs: &[SetupSpec], cfg: &RunConfig) -> Result<Table> {
    let mut table = Table::new(BIAS_COLUMNS);
    let methods = [AnovaMethod::Standard, AnovaMethod::Welch];
    // [setup][method] -> per-set (f_a, p_a, f_f, p_f, delta_p, pairs)
    type Row = [Option<f64>; 5];
    let mut agg: Vec<Vec<Vec<(Row, f64)>>> = vec![vec![Vec::new(); methods.len()]; specs.len()];
    for ds in datasets {
        for (si, setup) in setups(ds, specs)?.iter().enumerate() {
            let c = concordance_counts(&setup.mqm.adequacy, &setup.mqm.fluency)?;
            for (mi, &method) in methods.iter().enumerate() {
                let mut row = vec![
                    ds.name.clone(),
                    setup.spec.label(),
                    method.to_string(),
                    setup.set.num_systems().to_string(),
                ];
                let values: Row = match bias_report(&setup.mqm.adequacy, &setup.mqm.fluency, method)
                {
                    Ok(r) => {
                        if r.adequacy.degenerate || r.fluency.degenerate {
                            warn!("{}: {method} ANOVA degenerate, sentinel used", ds.name);
                        }
                        row.extend([
                            num(Some(r.adequacy.f_statistic)),
                            num(Some(r.adequacy.p_value)),
                            num(Some(r.fluency.f_statistic)),
                            num(Some(r.fluency.p_value)),
                            num(Some(r.delta_p)),
                            num(Some(r.b_value)),
                            r.dominant.to_string(),
                        ]);
                        [
                            Some(r.adequacy.f_statistic),
                            Some(r.adequacy.p_value),
                            Some(r.fluency.f_statistic),
                            Some(r.fluency.p_value),
                            Some(r.delta_p),
                        ]
                    }
                    Err(e) => {
                        warn!("{}: {method} ANOVA unavailable: {e}", ds.name);
                        row.extend(std::iter::repeat_n(String::new(), 7));
                        [None; 5]
                    }
                };
                row.extend([
                    c.concordant.to_string(),
                    c.discordant.to_string(),
                    c.tied.to_string(),
                ]);
                table.push(row);
                agg[si][mi].push((values, num_pairs(setup)));
            }
        }
    }
    if datasets.len() > 1 {
        for (si, spec) in specs.iter().enumerate() {
            for (mi, method) in methods.iter().enumerate() {
                let col = |c: usize| {
                    combine(
                        &agg[si][mi]
                            .iter()
                            .map(|(v, w)| (v[c], *w))
                            .collect::<Vec<_>>(),
                        cfg.aggregate,
                    )
                };
                let dp = col(4);
                let mut row = vec![
                    cfg.aggregate.to_string(),
                    spec.label(),
                    method.to_string(),
                    String::new(),
                ];
                row.extend((0..5).map(|c| num(col(c))));
                row.push(num(dp.map(b_transform)));
                row.push(dp.map_or(String::new(), |d| Dominance::from_delta_p(d).to_string()));
                row.extend([String::new(), String::new(), String::new()]);
                table.push(row);
            }
        }
    }
    Ok(table)
}

pub fn cmd_bias(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = cfg.setups_or(SetupSpec::rows(cfg.seed));
    let datasets = load_all(cfg)?;
    let table = bias_table(&datasets, &specs, cfg)?;
    let p = cfg.out_dir.join("bias.csv");
    table.write(&p, &ReportMeta::new("bias", cfg, &setup_labels(&specs)))?;
    Ok(vec![p])
}

// ---------------------------------------------------------------- synthesize

pub fn cmd_synthesize(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = cfg.setups_or(vec![SetupSpec::balanced(cfg.seed)]);
    let meta = ReportMeta::new("synthesize", cfg, &setup_labels(&specs));
    let mut written = Vec::new();
    for ds in load_all(cfg)? {
        for setup in setups(&ds, &specs)? {
            let dir = cfg.out_dir.join(&ds.name).join(file_label(&setup.spec));
            write_dir(
                &dir,
                &setup.mqm.adequacy,
                &setup.mqm.fluency,
                Some(&setup.mqm.other),
                &setup.externals,
            )?;
            let mut manifest = Table::new(&["system", "seg_id", "source_system"]);
            for (k, sys) in setup.set.systems().iter().enumerate() {
                for (j, seg) in setup.set.segments().iter().enumerate() {
                    manifest.push(vec![
                        sys.clone(),
                        seg.id.clone(),
                        ds.set.systems()[setup.sources[k][j]].clone(),
                    ]);
                }
            }
            let p = dir.join("assignment.csv");
            manifest.write(&p, &meta)?;
            info!(
                "{}: wrote {} systems to {}",
                ds.name,
                setup.set.num_systems(),
                dir.display()
            );
            written.push(dir);
        }
    }
    Ok(written)
}

// ---------------------------------------------------------------- breakdown

pub fn breakdown_table(
    datasets: &[Dataset],
    specs: &[SetupSpec],
    cfg: &RunConfig,
) -> Result<Table> {
    let mut table = Table::new(BREAKDOWN_COLUMNS);
    // [setup] -> metric -> per-set values
    type Vals = [Option<f64>; 4];
    let mut agg: PerSetup<String, (Vals, f64)> = vec![Vec::new(); specs.len()];
    for ds in datasets {
        for (si, setup) in setups(ds, specs)?.iter().enumerate() {
            for (name, m) in labelled(setup) {
                let b = pa_breakdown(m, &setup.mqm.adequacy, &setup.mqm.fluency)?;
                let d = b.discordant;
                let vals: Vals = [
                    b.pa_concordant,
                    d.map(|d| d.agree_adequacy),
                    d.map(|d| d.agree_fluency),
                    d.map(|d| d.metric_tie_fraction),
                ];
                table.push(vec![
                    ds.name.clone(),
                    setup.spec.label(),
                    name.clone(),
                    b.concordant_pairs.to_string(),
                    num(vals[0]),
                    b.discordant_pairs.to_string(),
                    num(vals[1]),
                    num(vals[2]),
                    num(vals[3]),
                    b.tied_pairs.to_string(),
                ]);
                match agg[si].iter_mut().find(|(n, _)| *n == name) {
                    Some(s) => s.1.push((vals, num_pairs(setup))),
                    None => agg[si].push((name, vec![(vals, num_pairs(setup))])),
                }
            }
        }
    }
    if datasets.len() > 1 {
        for (si, spec) in specs.iter().enumerate() {
            for (name, per_set) in &agg[si] {
                let col = |c: usize| {
                    combine(
                        &per_set.iter().map(|(v, w)| (v[c], *w)).collect::<Vec<_>>(),
                        cfg.aggregate,
                    )
                };
                table.push(vec![
                    cfg.aggregate.to_string(),
                    spec.label(),
                    name.clone(),
                    String::new(),
                    num(col(0)),
                    String::new(),
                    num(col(1)),
                    num(col(2)),
                    num(col(3)),
                    String::new(),
                ]);
            }
        }
    }
    Ok(table)
}

/// Rows of `table` belonging to the aggregate (or the only set) for one
/// setup, as `(metric, adequacy, fluency, tie)` bars.
fn breakdown_bars(table: &Table, setup: &str, set: &str) -> Vec<(String, f64, f64, f64)> {
    table
        .rows
        .iter()
        .filter(|r| r[0] == set && r[1] == setup)
        .filter_map(|r| {
            let p = |i: usize| r[i].parse::<f64>().ok();
            Some((r[2].clone(), p(6)?, p(7)?, p(8)?))
        })
        .collect()
}

pub fn cmd_breakdown(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = cfg.setups_or(vec![
        SetupSpec::original(cfg.seed),
        SetupSpec::balanced(cfg.seed),
    ]);
    let datasets = load_all(cfg)?;
    let table = breakdown_table(&datasets, &specs, cfg)?;
    let meta = ReportMeta::new("breakdown", cfg, &setup_labels(&specs));
    let p = cfg.out_dir.join("breakdown.csv");
    table.write(&p, &meta)?;
    let mut written = vec![p];
    let set = summary_set(&datasets, cfg);
    for spec in &specs {
        let bars = breakdown_bars(&table, &spec.label(), &set);
        let svg = breakdown_svg(&format!("Discordant pairs, {}", spec.label()), &bars);
        let p = cfg
            .out_dir
            .join(format!("breakdown_{}.svg", file_label(spec)));
        write_atomic(&p, svg.as_bytes())?;
        written.push(p);
    }
    Ok(written)
}

fn summary_set(datasets: &[Dataset], cfg: &RunConfig) -> String {
    if datasets.len() == 1 {
        datasets[0].name.clone()
    } else {
        cfg.aggregate.to_string()
    }
}

// ---------------------------------------------------------------- spa plane

pub fn spa_plane_table(
    datasets: &[Dataset],
    specs: &[SetupSpec],
    cfg: &RunConfig,
) -> Result<Table> {
    let plane_cfg = SpaPlaneConfig {
        permutation: permutation(cfg)?,
        grid: cfg.grid(),
        instances: cfg.instances,
        noise_seed: cfg.seed,
    };
    let mut table = Table::new(SPA_PLANE_COLUMNS);
    // [setup] -> (series, label) -> per-set (x, y, pairs)
    let mut agg: PerSetup<(String, String), (f64, f64, f64)> = vec![Vec::new(); specs.len()];
    for ds in datasets {
        for (si, setup) in setups(ds, specs)?.iter().enumerate() {
            let metrics = labelled(setup);
            let mats: Vec<&ScoreMatrix> = metrics.iter().map(|(_, m)| *m).collect();
            let plane = spa_plane(&mats, &setup.mqm.adequacy, &setup.mqm.fluency, &plane_cfg)?;
            let mut rows: Vec<(String, String, f64, f64)> = metrics
                .iter()
                .zip(&plane.points)
                .map(|((name, _), p)| ("metric".to_string(), name.clone(), p.x, p.y))
                .collect();
            for line in &plane.lines {
                rows.extend(
                    line.points
                        .iter()
                        .map(|p| (line.kind.to_string(), p.label.clone(), p.x, p.y)),
                );
            }
            for (series, label, x, y) in rows {
                table.push(vec![
                    ds.name.clone(),
                    setup.spec.label(),
                    series.clone(),
                    label.clone(),
                    num(Some(x)),
                    num(Some(y)),
                ]);
                let key = (series, label);
                let pairs = num_pairs(setup);
                match agg[si].iter_mut().find(|(k, _)| *k == key) {
                    Some(s) => s.1.push((x, y, pairs)),
                    None => agg[si].push((key, vec![(x, y, pairs)])),
                }
            }
        }
    }
    if datasets.len() > 1 {
        for (si, spec) in specs.iter().enumerate() {
            for ((series, label), per_set) in &agg[si] {
                let x = combine(
                    &per_set.iter().map(|v| (Some(v.0), v.2)).collect::<Vec<_>>(),
                    cfg.aggregate,
                );
                let y = combine(
                    &per_set.iter().map(|v| (Some(v.1), v.2)).collect::<Vec<_>>(),
                    cfg.aggregate,
                );
                table.push(vec![
                    cfg.aggregate.to_string(),
                    spec.label(),
                    series.clone(),
                    label.clone(),
                    num(x),
                    num(y),
                ]);
            }
        }
    }
    Ok(table)
}

fn plane_svg(table: &Table, setup: &str, set: &str) -> String {
    let rows: Vec<&Vec<String>> = table
        .rows
        .iter()
        .filter(|r| r[0] == set && r[1] == setup)
        .collect();
    let xy = |r: &Vec<String>| {
        (
            r[4].parse::<f64>().unwrap_or(f64::NAN),
            r[5].parse::<f64>().unwrap_or(f64::NAN),
        )
    };
    let points: Vec<(String, f64, f64)> = rows
        .iter()
        .filter(|r| r[2] == "metric")
        .map(|r| {
            let (x, y) = xy(r);
            (r[3].clone(), x, y)
        })
        .collect();
    let line = |kind: LineKind, color: &'static str| PlaneLine {
        name: match kind {
            LineKind::Tradeoff => "tradeoff",
            LineKind::AdequacyKnowledge => "adequacy knowledge",
            LineKind::FluencyKnowledge => "fluency knowledge",
        },
        color,
        points: rows
            .iter()
            .filter(|r| r[2] == kind.to_string())
            .map(|r| xy(r))
            .collect(),
    };
    let lines = [
        line(LineKind::Tradeoff, "#c0392b"),
        line(LineKind::AdequacyKnowledge, "#2e86c1"),
        line(LineKind::FluencyKnowledge, "#28b463"),
    ];
    spa_plane_svg(&format!("SPA plane, {setup}"), &points, &lines)
}

pub fn cmd_spa_plane(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = cfg.setups_or(vec![SetupSpec::original(cfg.seed)]);
    let datasets = load_all(cfg)?;
    let table = spa_plane_table(&datasets, &specs, cfg)?;
    let p = cfg.out_dir.join("spa_plane.csv");
    table.write(
        &p,
        &ReportMeta::new("spa-plane", cfg, &setup_labels(&specs)),
    )?;
    let mut written = vec![p];
    let set = summary_set(&datasets, cfg);
    for spec in &specs {
        let p = cfg
            .out_dir
            .join(format!("spa_plane_{}.svg", file_label(spec)));
        write_atomic(&p, plane_svg(&table, &spec.label(), &set).as_bytes())?;
        written.push(p);
    }
    Ok(written)
}

// ---------------------------------------------------------------- sensitivity

pub fn sensitivity_table(
    datasets: &[Dataset],
    specs: &[SetupSpec],
    cfg: &RunConfig,
) -> Result<Table> {
    let mut table = Table::new(SENSITIVITY_COLUMNS);
    let mut agg: PerSetup<(String, &'static str), TwoWeighted> = vec![Vec::new(); specs.len()];
    for ds in datasets {
        for (si, setup) in setups(ds, specs)?.iter().enumerate() {
            for (name, m) in labelled(setup) {
                for (axis, vary, hold) in [
                    ("adequacy", &setup.mqm.adequacy, &setup.mqm.fluency),
                    ("fluency", &setup.mqm.fluency, &setup.mqm.adequacy),
                ] {
                    let (u, n, pairs) = match sensitivity(m, vary, hold, cfg.weighting) {
                        Ok(r) => (Some(r.unnormalized), r.normalized, r.pairs_used),
                        Err(mqmeta::Error::NoQualifyingPairs) => (None, None, 0),
                        Err(e) => return Err(e.into()),
                    };
                    table.push(vec![
                        ds.name.clone(),
                        setup.spec.label(),
                        name.clone(),
                        axis.to_string(),
                        num(u),
                        num(n),
                        pairs.to_string(),
                    ]);
                    let key = (name.clone(), axis);
                    match agg[si].iter_mut().find(|(k, _)| *k == key) {
                        Some(s) => s.1.push((u, n, pairs as f64)),
                        None => agg[si].push((key, vec![(u, n, pairs as f64)])),
                    }
                }
            }
        }
    }
    if datasets.len() > 1 {
        for (si, spec) in specs.iter().enumerate() {
            for ((name, axis), per_set) in &agg[si] {
                let u = combine(
                    &per_set.iter().map(|v| (v.0, v.2)).collect::<Vec<_>>(),
                    cfg.aggregate,
                );
                let n = combine(
                    &per_set.iter().map(|v| (v.1, v.2)).collect::<Vec<_>>(),
                    cfg.aggregate,
                );
                let pairs: f64 = per_set.iter().map(|v| v.2).sum();
                table.push(vec![
                    cfg.aggregate.to_string(),
                    spec.label(),
                    name.clone(),
                    axis.to_string(),
                    num(u),
                    num(n),
                    (pairs as usize).to_string(),
                ]);
            }
        }
    }
    Ok(table)
}

pub fn cmd_sensitivity(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let specs = cfg.setups_or(vec![SetupSpec::original(cfg.seed)]);
    let datasets = load_all(cfg)?;
    let table = sensitivity_table(&datasets, &specs, cfg)?;
    let p = cfg.out_dir.join("sensitivity.csv");
    table.write(
        &p,
        &ReportMeta::new("sensitivity", cfg, &setup_labels(&specs)),
    )?;
    Ok(vec![p])
}

// ---------------------------------------------------------------- generate

pub fn cmd_generate(cfg: &RunConfig, spec: &SyntheticSpec) -> Result<Vec<PathBuf>> {
    let data = generate(spec)?;
    write_dir(
        &cfg.out_dir,
        &data.adequacy,
        &data.fluency,
        None,
        &data.metrics,
    )?;
    let mut manifest = Table::new(&[
        "system",
        "adequacy_mean",
        "adequacy_sd",
        "fluency_mean",
        "fluency_sd",
    ]);
    for i in 0..spec.num_systems() {
        manifest.push(vec![
            data.adequacy.systems()[i].clone(),
            num(Some(spec.adequacy_means[i])),
            num(Some(spec.adequacy_sd[i])),
            num(Some(spec.fluency_means[i])),
            num(Some(spec.fluency_sd[i])),
        ]);
    }
    let p = cfg.out_dir.join("generator.csv");
    let mut meta = ReportMeta::new("generate", cfg, "");
    meta.seed = spec.seed;
    manifest.write(&p, &meta)?;
    Ok(vec![cfg.out_dir.clone()])
}
