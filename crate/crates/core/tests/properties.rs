use proptest::prelude::*;

use mqmeta::bias::b_transform;
use mqmeta::data::{
    align, parse_mqm_str, to_canonical_tsv, AlignMode, Orientation, ScoreMatrix, ScoreTable,
};
use mqmeta::meta::{
    concordance_counts, pairwise_accuracy, pairwise_accuracy_means, soft_pairwise_accuracy,
};
use mqmeta::protocols::{
    pa_breakdown_means, sensitivity, spa_plane, spa_plane_with_noise, LineKind, NoiseSource,
    PairWeighting, SpaPlaneConfig,
};
use mqmeta::scoring::{mqm_matrices, AspectClass, Taxonomy, WeightScheme};
use mqmeta::stats::{f_cdf, f_sf, f_statistic, welch_f_statistic, PermutationConfig};
use mqmeta::synth::{build_setup, synthesize, Axis, SetupSpec};

const HEADER: &str = "system\tdoc\tseg_id\trater\tsource\ttarget\tcategory\tseverity\n";
const CATEGORIES: &[&str] = &[
    "Accuracy/Mistranslation",
    "Accuracy/Omission",
    "Fluency/Grammar",
    "Fluency/Punctuation",
    "Style/Awkward",
    "Non-translation!",
    "Made up",
    "No-error",
];
const SEVERITIES: &[&str] = &["Major", "minor", "Neutral"];

/// (system, segment, rater, category, severity) index tuples; the first two
/// rows make sure at least two systems share a complete segment.
fn rows() -> impl Strategy<Value = Vec<(usize, usize, usize, usize, usize)>> {
    prop::collection::vec(
        (
            0..3usize,
            0..4usize,
            0..2usize,
            0..CATEGORIES.len(),
            0..SEVERITIES.len(),
        ),
        0..40,
    )
    .prop_map(|mut v| {
        v.insert(0, (1, 0, 0, 0, 1));
        v.insert(0, (0, 0, 0, 7, 0));
        v
    })
}

fn render(rows: &[(usize, usize, usize, usize, usize)]) -> Vec<String> {
    rows.iter()
        .map(|&(s, g, r, c, v)| {
            let sev = if CATEGORIES[c] == "No-error" {
                "no-error"
            } else {
                SEVERITIES[v]
            };
            format!(
                "sys{s}\td{}\t{g}\tr{r}\tsrc {g}\tout {s} {g}\t{}\t{sev}",
                g % 2,
                CATEGORIES[c]
            )
        })
        .collect()
}

fn tsv(lines: &[String]) -> String {
    format!("{HEADER}{}\n", lines.join("\n"))
}

fn matrix(k: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0..25.0f64, n), k)
}

fn int_matrix(k: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec((0..6i32).prop_map(f64::from), n), k)
}

fn lower(rows: &[Vec<f64>]) -> ScoreMatrix {
    ScoreMatrix::from_rows("m", rows, Orientation::LowerBetter)
}

fn higher(rows: &[Vec<f64>]) -> ScoreMatrix {
    ScoreMatrix::from_rows("m", rows, Orientation::HigherBetter)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mqm_canonical_round_trip(r in rows(), lp in prop::option::of("[a-z]{2}-[a-z]{2}")) {
        let text = match &lp {
            Some(lp) => tsv(&render(&r))
                .lines()
                .enumerate()
                .map(|(i, l)| format!("{l}\t{}\n", if i == 0 { "lp" } else { lp.as_str() }))
                .collect(),
            None => tsv(&render(&r)),
        };
        let set = parse_mqm_str(&text, "t").unwrap();
        prop_assert_eq!(&set.language_pair, &lp.unwrap_or_default());
        let again = parse_mqm_str(&to_canonical_tsv(&set), "t").unwrap();
        prop_assert_eq!(set, again);
    }

    #[test]
    fn mqm_parse_is_row_order_insensitive(r in rows(), seed in any::<u64>()) {
        let lines = render(&r);
        let mut shuffled = lines.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(parse_mqm_str(&tsv(&lines), "t").unwrap(), parse_mqm_str(&tsv(&shuffled), "t").unwrap());
    }

    #[test]
    fn aligned_matrices_match_set_shape(r in rows()) {
        let set = parse_mqm_str(&tsv(&render(&r)), "t").unwrap();
        if let Ok(a) = align(&set, &[], AlignMode::DropIncomplete) {
            prop_assert!(a.set.is_complete());
            let m = mqm_matrices(&a.set, &WeightScheme::default(), &Taxonomy::default_taxonomy()).unwrap();
            prop_assert_eq!(m.all.shape(), (a.set.num_systems(), a.set.num_segments()));
        }
    }

    #[test]
    fn mqm_all_is_sum_of_aspects(r in rows()) {
        let set = parse_mqm_str(&tsv(&render(&r)), "t").unwrap();
        let Ok(a) = align(&set, &[], AlignMode::DropIncomplete) else { return Ok(()) };
        let m = mqm_matrices(&a.set, &WeightScheme::default(), &Taxonomy::default_taxonomy()).unwrap();
        let (k, n) = m.all.shape();
        for i in 0..k {
            for j in 0..n {
                let sum = m.adequacy.raw(i, j) + m.fluency.raw(i, j) + m.other.raw(i, j);
                prop_assert!((m.all.raw(i, j) - sum).abs() < 1e-9);
            }
        }
    }

    /// An extra error from a rater already present in the cell never lowers
    /// any score (a new rater could, since raters are averaged).
    #[test]
    fn extra_error_never_lowers_scores(r in rows(), extra in (0..CATEGORIES.len() - 1, 0..SEVERITIES.len()), pick in any::<prop::sample::Index>()) {
        let mut lines = render(&r);
        let base = parse_mqm_str(&tsv(&lines), "t").unwrap();
        let Ok(before) = align(&base, &[], AlignMode::DropIncomplete) else { return Ok(()) };
        let (s, g, rater, _, _) = r[pick.index(r.len())];
        lines.extend(render(&[(s, g, rater, extra.0, extra.1)]));
        let after = align(&parse_mqm_str(&tsv(&lines), "t").unwrap(), &[], AlignMode::DropIncomplete).unwrap();
        prop_assume!(after.set.segment_ids() == before.set.segment_ids());
        let w = WeightScheme::default();
        let t = Taxonomy::default_taxonomy();
        let (m0, m1) = (mqm_matrices(&before.set, &w, &t).unwrap(), mqm_matrices(&after.set, &w, &t).unwrap());
        for (a, b) in [(&m0.all, &m1.all), (&m0.adequacy, &m1.adequacy), (&m0.fluency, &m1.fluency), (&m0.other, &m1.other)] {
            for (x, y) in a.raw_values().iter().zip(b.raw_values()) {
                prop_assert!(y >= x - 1e-12);
            }
        }
    }

    #[test]
    fn every_category_has_one_class(cat in "[A-Za-z/ -]{0,24}") {
        for t in [Taxonomy::default_taxonomy(), Taxonomy::en_es()] {
            let hits = [AspectClass::Adequacy, AspectClass::Fluency, AspectClass::Other]
                .iter()
                .filter(|c| t.categories(**c).any(|x| x == mqmeta::scoring::normalize_category(&cat)))
                .count();
            prop_assert!(hits <= 1);
        }
    }

    #[test]
    fn score_tsv_round_trip(rows in (2..5usize, 1..8usize).prop_flat_map(|(k, n)| matrix(k, n))) {
        let m = lower(&rows);
        let text = ScoreTable::from_matrix(&m).to_tsv();
        let back = mqmeta::data::parse_score_tsv_str(&text, "m", Orientation::LowerBetter).unwrap().to_own_matrix().unwrap();
        prop_assert_eq!(back.raw_values(), m.raw_values());
        prop_assert_eq!(back.systems(), m.systems());
    }

    #[test]
    fn f_is_affine_invariant(rows in (2..7usize, 2..20usize).prop_flat_map(|(k, n)| matrix(k, n)), c in 0.01..100.0f64, b in -50.0..50.0f64) {
        let moved: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| c * x + b).collect()).collect();
        for f in [f_statistic, welch_f_statistic] {
            let (f0, f1) = (f(&lower(&rows)).unwrap().f_statistic, f(&lower(&moved)).unwrap().f_statistic);
            prop_assert!((f0 - f1).abs() <= 1e-9 * f0.abs().max(1.0), "{} vs {}", f0, f1);
        }
    }

    #[test]
    fn f_matches_two_pass_decomposition(rows in (2..7usize, 2..20usize).prop_flat_map(|(k, n)| matrix(k, n))) {
        let (k, n) = (rows.len(), rows[0].len());
        let means: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
        let grand = means.iter().sum::<f64>() / k as f64;
        let ssb: f64 = means.iter().map(|m| n as f64 * (m - grand).powi(2)).sum();
        let ssw: f64 = rows.iter().zip(&means).flat_map(|(r, m)| r.iter().map(move |x| (x - m).powi(2))).sum();
        let expect = (ssb / (k - 1) as f64) / (ssw / (k * n - k) as f64);
        let got = f_statistic(&lower(&rows)).unwrap();
        prop_assert!((got.f_statistic - expect).abs() <= 1e-9 * expect.max(1.0));
        prop_assert_eq!((got.df_between, got.df_within), (k - 1, (k * n - k) as f64));
    }

    #[test]
    fn f_cdf_is_monotone_and_complements_sf(x in 0.0..50.0f64, dx in 0.0..10.0f64, d1 in 1.0..30.0f64, d2 in 1.0..200.0f64) {
        let (a, b) = (f_cdf(x, d1, d2).unwrap(), f_cdf(x + dx, d1, d2).unwrap());
        prop_assert!((0.0..=1.0).contains(&a) && b >= a - 1e-12);
        prop_assert!((a + f_sf(x, d1, d2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pa_ignores_increasing_transforms(metric in prop::collection::vec(-5.0..5.0f64, 2..9), seed in prop::collection::vec(-5.0..5.0f64, 9)) {
        let human: Vec<f64> = seed[..metric.len()].to_vec();
        let a = pairwise_accuracy_means(&metric, &human);
        let moved: Vec<f64> = metric.iter().map(|x| x.powi(3) + 2.0 * x.exp()).collect();
        let b = pairwise_accuracy_means(&moved, &human);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.value, b.value);
                prop_assert!((0.0..=1.0).contains(&a.value));
                prop_assert_eq!(a.pairs_used + a.pairs_excluded_human_tie, metric.len() * (metric.len() - 1) / 2);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "availability changed"),
        }
    }

    #[test]
    fn concordance_partitions_pairs((a, f) in (2..7usize, 1..5usize).prop_flat_map(|(k, n)| (int_matrix(k, n), int_matrix(k, n)))) {
        let c = concordance_counts(&lower(&a), &lower(&f)).unwrap();
        let k = a.len();
        prop_assert_eq!(c.total(), k * (k - 1) / 2);
    }

    #[test]
    fn spa_is_bounded_and_direction_symmetric((h, m) in (2..5usize, 3..12usize).prop_flat_map(|(k, n)| (matrix(k, n), matrix(k, n)))) {
        let cfg = PermutationConfig::new(199, 5).unwrap();
        let spa = soft_pairwise_accuracy(&higher(&m), &higher(&h), &cfg).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&spa));
        // negating both scorings reverses the direction of every test
        let swapped = soft_pairwise_accuracy(&lower(&m), &lower(&h), &cfg).unwrap().value;
        prop_assert!((spa - swapped).abs() <= 2.0 / 200.0 + 1e-12, "{} vs {}", spa, swapped);
    }

    #[test]
    fn b_is_bounded_and_increasing(x in 1e-300..1.0f64, y in 1e-300..1.0f64) {
        let (bx, by) = (b_transform(x), b_transform(y));
        prop_assert!((0.0..=1.0).contains(&bx));
        prop_assert_eq!(b_transform(-x), bx);
        if x < y {
            prop_assert!(bx <= by);
        }
    }

    #[test]
    fn synthesis_preserves_segment_multisets((a, f) in (2..6usize, 1..10usize).prop_flat_map(|(k, n)| (int_matrix(k, n), int_matrix(k, n))), seed in any::<u64>()) {
        let (am, fm) = (lower(&a), lower(&f));
        for axis in [Axis::Adequacy, Axis::Fluency] {
            let s = synthesize(if axis == Axis::Adequacy { &am } else { &fm }, axis, seed).unwrap();
            let axis_m = if axis == Axis::Adequacy { &am } else { &fm };
            for m in [&am, &fm] {
                let out = s.apply(m);
                for j in 0..m.num_segments() {
                    let mut before: Vec<f64> = (0..m.num_systems()).map(|i| m.raw(i, j)).collect();
                    let mut after: Vec<f64> = (0..m.num_systems()).map(|i| out.raw(i, j)).collect();
                    before.sort_by(f64::total_cmp);
                    after.sort_by(f64::total_cmp);
                    prop_assert_eq!(before, after);
                }
            }
            // rank r holds the r-th best penalty of its axis in every segment
            let ranked = s.apply(axis_m);
            for j in 0..ranked.num_segments() {
                for i in 1..ranked.num_systems() {
                    prop_assert!(ranked.raw(i - 1, j) <= ranked.raw(i, j));
                }
            }
        }
    }

    #[test]
    fn breakdown_fractions_sum_to_one(v in prop::collection::vec((0..5i32, 0..5i32, 0..5i32), 2..10)) {
        let m: Vec<f64> = v.iter().map(|x| x.0 as f64).collect();
        let a: Vec<f64> = v.iter().map(|x| x.1 as f64).collect();
        let f: Vec<f64> = v.iter().map(|x| x.2 as f64).collect();
        let b = pa_breakdown_means(&m, &a, &f);
        prop_assert_eq!(b.concordant_pairs + b.discordant_pairs + b.tied_pairs, v.len() * (v.len() - 1) / 2);
        if let Some(d) = b.discordant {
            prop_assert!((d.agree_adequacy + d.agree_fluency + d.metric_tie_fraction - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sensitivity_scales_with_metric((a, f, m) in (2..5usize, 2..30usize).prop_flat_map(|(k, n)| (int_matrix(k, n), int_matrix(k, n), matrix(k, n))), c in 0.1..10.0f64, b in -5.0..5.0f64) {
        let (am, fm) = (lower(&a), lower(&f));
        let scaled: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|x| c * x + b).collect()).collect();
        let base = sensitivity(&higher(&m), &am, &fm, PairWeighting::Global);
        let moved = sensitivity(&higher(&scaled), &am, &fm, PairWeighting::Global);
        if let (Ok(x), Ok(y)) = (&base, &moved) {
            prop_assert!((y.unnormalized - c * x.unnormalized).abs() <= 1e-9 * (1.0 + x.unnormalized.abs() * c));
            if let (Some(p), Some(q)) = (x.normalized, y.normalized) {
                prop_assert!((p - q).abs() <= 1e-9 * (1.0 + p.abs()));
            }
        } else {
            prop_assert!(base.is_err() && moved.is_err());
        }
    }

    #[test]
    fn original_setup_is_identity((a, f) in (2..5usize, 1..6usize).prop_flat_map(|(k, n)| (int_matrix(k, n), int_matrix(k, n))), seed in any::<u64>()) {
        let mqm = mqmeta::scoring::MqmScores::from_aspects(lower(&a), lower(&f), None).unwrap();
        let set = mqmeta::data::EvaluationSet::skeleton("s", "", mqm.all.systems().to_vec(), mqm.all.segments().to_vec()).unwrap();
        let s = build_setup(&set, &SetupSpec::original(seed), &mqm, &[]).unwrap();
        prop_assert_eq!(&s.mqm.all, &mqm.all);
        prop_assert_eq!(&s.mqm.adequacy, &mqm.adequacy);
        let all3 = build_setup(&set, &SetupSpec::rows(seed)[6], &mqm, &[]).unwrap();
        prop_assert_eq!(all3.set.num_systems(), 3 * a.len());
    }
}

fn envelope(line: &[(f64, f64)], x: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for w in line.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let (lo, hi) = (x0.min(x1), x0.max(x1));
        if (lo..=hi).contains(&x) {
            let y = if hi > lo {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            } else {
                y0.max(y1)
            };
            best = best.max(y);
        }
    }
    if best.is_finite() {
        best
    } else {
        line.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// With independent aspects no metric built from them and noise beats the
/// tradeoff line.
#[test]
fn spa_plane_metrics_lie_under_tradeoff_line() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let (k, n) = (6, 120);
    let a: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..n)
                .map(|_| (i as f64 + rng.random_range(0.0..6.0)).round())
                .collect()
        })
        .collect();
    let f: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..n)
                .map(|_| ((k - i) as f64 * 0.5 + rng.random_range(0.0..4.0)).round())
                .collect()
        })
        .collect();
    let (am, fm) = (lower(&a), lower(&f));
    let metrics: Vec<ScoreMatrix> = [0.0, 0.3, 0.5, 0.8, 1.0]
        .iter()
        .map(|&w| {
            let rows: Vec<Vec<f64>> = (0..k)
                .map(|i| {
                    (0..n)
                        .map(|j| -(w * a[i][j] + (1.0 - w) * f[i][j]) + rng.random_range(-2.0..2.0))
                        .collect()
                })
                .collect();
            higher(&rows)
        })
        .collect();
    let refs: Vec<&ScoreMatrix> = metrics.iter().collect();
    let cfg = SpaPlaneConfig {
        permutation: PermutationConfig::new(499, 3).unwrap(),
        instances: 2,
        ..Default::default()
    };
    let plane = spa_plane(&refs, &am, &fm, &cfg).unwrap();
    let line: Vec<(f64, f64)> = plane
        .line(LineKind::Tradeoff)
        .points
        .iter()
        .map(|p| (p.x, p.y))
        .collect();
    for p in &plane.points {
        assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));
        assert!(
            p.y <= envelope(&line, p.x) + 2.0 / 500.0,
            "{p:?} above the tradeoff line"
        );
    }
}

struct Constant;

impl NoiseSource for Constant {
    fn sample(&self, aspect: &ScoreMatrix, _: LineKind, _: usize, _: u64) -> ScoreMatrix {
        aspect.map_oriented("constant", |_| 3.0)
    }
}

/// At λ = 0 a knowledge line is the noise alone; with constant noise that is
/// the SPA of a constant scoring.
#[test]
fn constant_noise_gives_the_random_vertex() {
    let a = lower(&[
        vec![1.0, 4.0, 2.0, 0.0],
        vec![3.0, 5.0, 2.0, 4.0],
        vec![0.0, 0.0, 1.0, 2.0],
    ]);
    let f = lower(&[
        vec![2.0, 0.0, 1.0, 1.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![3.0, 1.0, 2.0, 5.0],
    ]);
    let cfg = SpaPlaneConfig {
        permutation: PermutationConfig::exhaustive(1),
        instances: 1,
        ..Default::default()
    };
    let plane = spa_plane_with_noise(&[], &a, &f, &cfg, &Constant).unwrap();
    let constant = a.map_oriented("c", |_| 3.0);
    let x = soft_pairwise_accuracy(&constant, &f, &cfg.permutation)
        .unwrap()
        .value;
    let y = soft_pairwise_accuracy(&constant, &a, &cfg.permutation)
        .unwrap()
        .value;
    for kind in [LineKind::AdequacyKnowledge, LineKind::FluencyKnowledge] {
        let p = &plane.line(kind).points[0];
        assert_eq!(p.label, "0.00");
        assert!(
            (p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12,
            "{kind}: {p:?} vs ({x}, {y})"
        );
    }
}

#[test]
fn pa_of_identity_and_inversion() {
    let h = lower(&[vec![1.0, 2.0], vec![3.0, 3.0], vec![0.0, 5.0]]);
    assert_eq!(pairwise_accuracy(&h, &h).unwrap().value, 1.0);
    let inverted = h.map_oriented("inv", |v| -v);
    assert_eq!(pairwise_accuracy(&inverted, &h).unwrap().value, 0.0);
}
