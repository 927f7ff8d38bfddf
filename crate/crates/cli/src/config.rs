//! Run configuration: a plain `key = value` file merged with command-line
//! flags (flags win).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mqmeta::data::Orientation;
use mqmeta::protocols::PairWeighting;
use mqmeta::scoring::{Taxonomy, TaxonomyName, WeightScheme};
use mqmeta::synth::SetupSpec;

use crate::error::{CliError, Result};

/// Keys accepted in config files; a flag `--foo-bar` maps to `foo_bar`.
pub const KNOWN_KEYS: &[&str] = &[
    "mqm",
    "data",
    "metric",
    "seed",
    "resamples",
    "weights",
    "taxonomy",
    "systems",
    "out_dir",
    "aggregate",
    "instances",
    "grid_step",
    "weighting",
    "strict",
    // generate
    "num_systems",
    "num_segments",
    "adequacy_spread",
    "fluency_spread",
    "adequacy_sd",
    "fluency_sd",
    "adequacy_base",
    "fluency_base",
    "segment_sd",
    "correlation",
    "lattice",
    "metric_noise",
];

/// Keys that may appear more than once; their values accumulate.
const REPEATABLE: &[&str] = &["mqm", "data", "metric", "systems"];

/// Raw settings: key to the list of values given for it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    map: BTreeMap<String, Vec<String>>,
}

fn normalize_key(key: &str) -> String {
    key.trim()
        .trim_start_matches("--")
        .replace('-', "_")
        .to_ascii_lowercase()
}

/// Parses `key = value` lines (`key: value` also accepted). `#` starts a
/// comment line; blank lines are skipped.
pub fn parse_config_str(text: &str) -> Result<Settings> {
    let mut settings = Settings::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(pos) = line.find(['=', ':']) else {
            return Err(CliError::Config {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = normalize_key(&line[..pos]);
        let value = line[pos + 1..].trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config {
                line: idx + 1,
                message: format!("unknown key `{key}`"),
            });
        }
        let slot = settings.map.entry(key.clone()).or_default();
        if REPEATABLE.contains(&key.as_str()) {
            slot.push(value);
        } else {
            *slot = vec![value];
        }
    }
    Ok(settings)
}

pub fn read_config_file(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text)
}

impl Settings {
    /// Replaces every value of `key` (a flag overriding the file).
    pub fn set(&mut self, key: &str, values: Vec<String>) {
        if !values.is_empty() {
            self.map.insert(normalize_key(key), values);
        }
    }

    pub fn all(&self, key: &str) -> &[String] {
        self.map.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn one<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key).and_then(|v| v.last()) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("invalid value `{v}` for `{key}`: {e}"))),
        }
    }

    pub fn one_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.one(key)?.unwrap_or(default))
    }
}

/// How results of several evaluation sets are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregate {
    /// Unweighted mean over evaluation sets.
    #[default]
    Macro,
    /// Mean weighted by the number of system pairs of each set.
    Micro,
}

impl FromStr for Aggregate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "macro" | "macro-average" | "per-set" => Ok(Aggregate::Macro),
            "micro" | "micro-average" => Ok(Aggregate::Micro),
            other => Err(format!("unknown aggregation `{other}` (macro|micro)")),
        }
    }
}

impl std::fmt::Display for Aggregate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Aggregate::Macro => "macro",
            Aggregate::Micro => "micro",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaxonomyChoice {
    /// Pick by language pair.
    Auto,
    Default,
    EnEs,
    File(PathBuf),
}

impl TaxonomyChoice {
    fn parse(s: &str) -> TaxonomyChoice {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" | "" => TaxonomyChoice::Auto,
            "default" => TaxonomyChoice::Default,
            "en-es" | "en_es" | "enes" => TaxonomyChoice::EnEs,
            _ => TaxonomyChoice::File(PathBuf::from(s.trim())),
        }
    }

    pub fn resolve(&self, language_pair: &str) -> Result<Taxonomy> {
        Ok(match self {
            TaxonomyChoice::Auto => Taxonomy::for_language_pair(language_pair),
            TaxonomyChoice::Default => Taxonomy::default_taxonomy(),
            TaxonomyChoice::EnEs => Taxonomy::en_es(),
            TaxonomyChoice::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                Taxonomy::parse(&text, TaxonomyName::Custom(p.display().to_string()))?
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            TaxonomyChoice::Auto => "auto".into(),
            TaxonomyChoice::Default => "default".into(),
            TaxonomyChoice::EnEs => "en-es".into(),
            TaxonomyChoice::File(p) => p.display().to_string(),
        }
    }
}

/// An external metric file: `name=path`, optionally suffixed `:lower` for
/// error-like scores.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub path: PathBuf,
    pub orientation: Orientation,
}

impl FromStr for MetricSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (body, orientation) = match s.rsplit_once(':') {
            Some((b, o)) if o.eq_ignore_ascii_case("lower") || o.eq_ignore_ascii_case("higher") => {
                (b, o.parse::<Orientation>().map_err(|e| e.to_string())?)
            }
            _ => (s, Orientation::HigherBetter),
        };
        let (name, path) = match body.split_once('=') {
            Some((n, p)) => (n.trim().to_string(), PathBuf::from(p.trim())),
            None => {
                let p = PathBuf::from(body.trim());
                let name = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .ok_or_else(|| format!("metric path `{body}` has no file name"))?;
                (name, p)
            }
        };
        if name.is_empty() {
            return Err(format!("metric `{s}` has an empty name"));
        }
        Ok(MetricSpec {
            name,
            path,
            orientation,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mqm: Vec<PathBuf>,
    pub data: Vec<PathBuf>,
    pub metrics: Vec<MetricSpec>,
    pub weights: WeightScheme,
    pub weights_path: Option<PathBuf>,
    pub taxonomy: TaxonomyChoice,
    /// Setups requested with `--systems`; empty means the command default.
    pub setups: Vec<SetupSpec>,
    pub seed: u64,
    pub resamples: usize,
    pub out_dir: PathBuf,
    pub aggregate: Aggregate,
    pub instances: usize,
    pub grid_step: f64,
    pub weighting: PairWeighting,
    pub strict: bool,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<RunConfig> {
        let seed = s.one_or("seed", 0u64)?;
        let weights_path: Option<PathBuf> = s.one("weights")?;
        let weights = match &weights_path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                WeightScheme::parse(&text)?
            }
            None => WeightScheme::default(),
        };
        let setups = s
            .all("systems")
            .iter()
            .flat_map(|v| v.split(';'))
            .filter(|v| !v.trim().is_empty())
            .map(|v| SetupSpec::parse(v, seed).map_err(CliError::from))
            .collect::<Result<Vec<_>>>()?;
        let metrics = s
            .all("metric")
            .iter()
            .map(|m| m.parse::<MetricSpec>().map_err(CliError::Usage))
            .collect::<Result<Vec<_>>>()?;
        let weighting = match s.one::<String>("weighting")?.as_deref() {
            None | Some("global") => PairWeighting::Global,
            Some("segment") | Some("segment-macro") => PairWeighting::SegmentMacro,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown weighting `{other}` (global|segment-macro)"
                )))
            }
        };
        let resamples = s.one_or("resamples", 1000usize)?;
        if resamples == 0 {
            return Err(CliError::Usage("resamples must be at least 1".into()));
        }
        let grid_step = s.one_or("grid_step", 0.05f64)?;
        if !(grid_step > 0.0 && grid_step <= 1.0) {
            return Err(CliError::Usage(format!(
                "grid step must be in (0, 1], got {grid_step}"
            )));
        }
        Ok(RunConfig {
            mqm: s.all("mqm").iter().map(PathBuf::from).collect(),
            data: s.all("data").iter().map(PathBuf::from).collect(),
            metrics,
            weights,
            weights_path,
            taxonomy: s
                .one::<String>("taxonomy")?
                .map_or(TaxonomyChoice::Auto, |t| TaxonomyChoice::parse(&t)),
            setups,
            seed,
            resamples,
            out_dir: s.one_or("out_dir", PathBuf::from("out"))?,
            aggregate: s.one_or("aggregate", Aggregate::Macro)?,
            instances: s.one_or("instances", 10usize)?,
            grid_step,
            weighting,
            strict: s.one_or("strict", false)?,
        })
    }

    /// Grid `0, step, 2 step, ..., 1` with 1 always included.
    pub fn grid(&self) -> Vec<f64> {
        let steps = (1.0 / self.grid_step).round() as usize;
        if ((steps as f64) * self.grid_step - 1.0).abs() < 1e-9 {
            (0..=steps).map(|i| i as f64 / steps as f64).collect()
        } else {
            let mut g: Vec<f64> = (0..)
                .map(|i| i as f64 * self.grid_step)
                .take_while(|&x| x < 1.0)
                .collect();
            g.push(1.0);
            g
        }
    }

    pub fn setups_or(&self, default: Vec<SetupSpec>) -> Vec<SetupSpec> {
        if self.setups.is_empty() {
            default
        } else {
            self.setups.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_repeats() {
        let s = parse_config_str(
            "# run\nseed = 7\nresamples: 200\nmetric = a=x.tsv\nmetric = b=y.tsv:lower\nout-dir = o\n",
        )
        .unwrap();
        assert_eq!(s.one::<u64>("seed").unwrap(), Some(7));
        assert_eq!(s.all("metric").len(), 2);
        let cfg = RunConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.resamples, 200);
        assert_eq!(cfg.metrics[1].orientation, Orientation::LowerBetter);
        assert_eq!(cfg.metrics[0].name, "a");
        assert_eq!(cfg.out_dir, PathBuf::from("o"));
    }

    #[test]
    fn flags_win() {
        let mut s = parse_config_str("seed = 7\nsystems = original").unwrap();
        s.set("seed", vec!["9".into()]);
        s.set("systems", vec![]);
        let cfg = RunConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.setups, vec![SetupSpec::original(9)]);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            parse_config_str("bogus = 1"),
            Err(CliError::Config { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_str("\nseed 1"),
            Err(CliError::Config { line: 2, .. })
        ));
        let s = parse_config_str("resamples = many").unwrap();
        assert!(RunConfig::from_settings(&s).is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        let s = parse_config_str("grid_step = 0.05").unwrap();
        let g = RunConfig::from_settings(&s).unwrap().grid();
        assert_eq!(g.len(), 21);
        assert_eq!((g[0], g[20]), (0.0, 1.0));
        let s = parse_config_str("grid_step = 0.3").unwrap();
        assert_eq!(
            RunConfig::from_settings(&s).unwrap().grid(),
            vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]
        );
    }
}
