//! Seeded synthetic MQM-score datasets for demos and self-tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use mqmeta::data::{Orientation, ScoreMatrix};
use mqmeta::stats::derive_seed;

use crate::config::Settings;
use crate::error::{CliError, Result};

/// Per-system score distributions. Cell penalties are normal draws around
/// the system mean plus a per-segment offset shared by all systems,
/// truncated at 0 and rounded to the `lattice` step.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub adequacy_means: Vec<f64>,
    pub fluency_means: Vec<f64>,
    pub adequacy_sd: Vec<f64>,
    pub fluency_sd: Vec<f64>,
    pub num_segments: usize,
    /// Standard deviation of the shared per-segment offset (drawn
    /// separately for each aspect).
    pub segment_sd: f64,
    /// Correlation of the adequacy and fluency draws within a cell.
    pub correlation: f64,
    pub lattice: f64,
    /// Noise of the generated metric scores.
    pub metric_noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Means spread evenly over `[base, base + spread]`; fluency means are
    /// assigned in a seeded random system order so the aspects disagree.
    #[allow(clippy::too_many_arguments)]
    pub fn spread(
        num_systems: usize,
        num_segments: usize,
        adequacy: (f64, f64, f64),
        fluency: (f64, f64, f64),
        seed: u64,
    ) -> SyntheticSpec {
        let (a_base, a_spread, a_sd) = adequacy;
        let (f_base, f_spread, f_sd) = fluency;
        let level = |i: usize| {
            if num_systems > 1 {
                i as f64 / (num_systems - 1) as f64
            } else {
                0.0
            }
        };
        let mut order: Vec<usize> = (0..num_systems).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(
            seed,
            &["fluency-order"],
        )));
        SyntheticSpec {
            adequacy_means: (0..num_systems)
                .map(|i| a_base + a_spread * level(i))
                .collect(),
            fluency_means: order
                .iter()
                .map(|&r| f_base + f_spread * level(r))
                .collect(),
            adequacy_sd: vec![a_sd; num_systems],
            fluency_sd: vec![f_sd; num_systems],
            num_segments,
            segment_sd: 1.0,
            correlation: 0.0,
            lattice: 1.0,
            metric_noise: 1.0,
            seed,
        }
    }

    /// Reads the generator keys of a run configuration.
    pub fn from_settings(s: &Settings, seed: u64) -> Result<SyntheticSpec> {
        let k = s.one_or("num_systems", 8usize)?;
        let n = s.one_or("num_segments", 500usize)?;
        let mut spec = SyntheticSpec::spread(
            k,
            n,
            (
                s.one_or("adequacy_base", 1.0)?,
                s.one_or("adequacy_spread", 3.0)?,
                s.one_or("adequacy_sd", 2.0)?,
            ),
            (
                s.one_or("fluency_base", 0.5)?,
                s.one_or("fluency_spread", 1.0)?,
                s.one_or("fluency_sd", 1.0)?,
            ),
            seed,
        );
        spec.segment_sd = s.one_or("segment_sd", spec.segment_sd)?;
        spec.correlation = s.one_or("correlation", spec.correlation)?;
        spec.lattice = s.one_or("lattice", spec.lattice)?;
        spec.metric_noise = s.one_or("metric_noise", spec.metric_noise)?;
        Ok(spec)
    }

    pub fn num_systems(&self) -> usize {
        self.adequacy_means.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_systems();
        let bad = |m: String| Err(CliError::Usage(m));
        if k < 2 || self.num_segments < 1 {
            return bad(format!(
                "need K >= 2 and N >= 1, got {k} x {}",
                self.num_segments
            ));
        }
        if [&self.fluency_means, &self.adequacy_sd, &self.fluency_sd]
            .iter()
            .any(|v| v.len() != k)
        {
            return bad("per-system parameter lists differ in length".into());
        }
        if !(-1.0..=1.0).contains(&self.correlation) {
            return bad(format!(
                "correlation must be in [-1, 1], got {}",
                self.correlation
            ));
        }
        let sds = self
            .adequacy_sd
            .iter()
            .chain(&self.fluency_sd)
            .chain([&self.segment_sd, &self.metric_noise]);
        if sds.into_iter().any(|s| !s.is_finite() || *s < 0.0) {
            return bad("standard deviations must be finite and >= 0".into());
        }
        if !self.lattice.is_finite() || self.lattice <= 0.0 {
            return bad(format!(
                "lattice step must be finite and > 0, got {}",
                self.lattice
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    /// Penalties, lower is better.
    pub adequacy: ScoreMatrix,
    pub fluency: ScoreMatrix,
    /// Higher-is-better metric scores: noisy negated adequacy, fluency and
    /// their average.
    pub metrics: Vec<ScoreMatrix>,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let (k, n) = (spec.num_systems(), spec.num_segments);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &["generate"]));
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let quantize = |x: f64| ((x.max(0.0) / spec.lattice).round() * spec.lattice).max(0.0);
    let rho = spec.correlation;
    let rho_c = (1.0 - rho * rho).sqrt();

    let mut a = vec![0.0; k * n];
    let mut f = vec![0.0; k * n];
    let mut metric_raw = vec![vec![0.0; k * n]; 3];
    for j in 0..n {
        let offset_a = spec.segment_sd * normal();
        let offset_f = spec.segment_sd * normal();
        for i in 0..k {
            let z1 = normal();
            let z2 = rho * z1 + rho_c * normal();
            let idx = i * n + j;
            a[idx] = quantize(spec.adequacy_means[i] + offset_a + spec.adequacy_sd[i] * z1);
            f[idx] = quantize(spec.fluency_means[i] + offset_f + spec.fluency_sd[i] * z2);
            let noise = spec.metric_noise;
            metric_raw[0][idx] = -a[idx] + noise * normal();
            metric_raw[1][idx] = -f[idx] + noise * normal();
            metric_raw[2][idx] = -(a[idx] + f[idx]) / 2.0 + noise * normal();
        }
    }
    let systems: Vec<String> = (0..k).map(|i| format!("sys{i:02}")).collect();
    let segments: Vec<String> = (0..n).map(|j| format!("seg{j:05}")).collect();
    let matrix = |name: &str, values: Vec<f64>, o: Orientation| {
        ScoreMatrix::from_raw(name, systems.clone(), segments.clone(), values, o)
    };
    let metrics = ["adequacy-like", "fluency-like", "balanced"]
        .iter()
        .zip(metric_raw)
        .map(|(name, v)| matrix(name, v, Orientation::HigherBetter))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SyntheticData {
        adequacy: matrix("adequacy", a, Orientation::LowerBetter)?,
        fluency: matrix("fluency", f, Orientation::LowerBetter)?,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mqmeta::bias::{bias_report, Dominance};
    use mqmeta::meta::concordance_counts;
    use mqmeta::stats::AnovaMethod;

    fn spec() -> SyntheticSpec {
        SyntheticSpec::spread(4, 30, (1.0, 4.0, 1.5), (1.0, 4.0, 1.5), 3)
    }

    #[test]
    fn deterministic_and_on_lattice() {
        let a = generate(&spec()).unwrap();
        assert_eq!(a, generate(&spec()).unwrap());
        assert!(a
            .adequacy
            .raw_values()
            .iter()
            .all(|v| *v >= 0.0 && v.fract() == 0.0));
        let mut other = spec();
        other.seed = 4;
        assert_ne!(a.adequacy, generate(&other).unwrap().adequacy);
    }

    #[test]
    fn equal_aspects_give_small_b() {
        let d = generate(&SyntheticSpec::spread(
            6,
            500,
            (1.0, 3.0, 1.0),
            (1.0, 3.0, 1.0),
            8,
        ))
        .unwrap();
        let r = bias_report(&d.adequacy, &d.fluency, AnovaMethod::Standard).unwrap();
        assert!(r.b_value < 0.1, "{r:?}");
    }

    /// Fluency with no system effect and no within-system spread: only the
    /// shared segment offset varies, so fluency separates nothing.
    #[test]
    fn adequacy_only_separation_gives_b_near_one() {
        let mut s = SyntheticSpec::spread(5, 300, (1.0, 4.0, 1.0), (2.0, 0.0, 0.0), 5);
        s.segment_sd = 1.0;
        let d = generate(&s).unwrap();
        let r = bias_report(&d.adequacy, &d.fluency, AnovaMethod::Standard).unwrap();
        assert_eq!(r.dominant, Dominance::A);
        assert!(r.b_value > 0.99, "{r:?}");
        let c = concordance_counts(&d.adequacy, &d.fluency).unwrap();
        assert_eq!(c.tied, 10);
    }

    #[test]
    fn validation() {
        let mut s = spec();
        s.correlation = 1.5;
        assert!(generate(&s).is_err());
        let s = SyntheticSpec::spread(1, 3, (0.0, 1.0, 1.0), (0.0, 1.0, 1.0), 0);
        assert!(generate(&s).is_err());
    }
}
