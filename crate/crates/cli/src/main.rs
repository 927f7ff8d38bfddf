use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use mqmeta_cli::commands;
use mqmeta_cli::config::{read_config_file, RunConfig, Settings};
use mqmeta_cli::error::Result;
use mqmeta_cli::generate::SyntheticSpec;

#[derive(Parser)]
#[command(
    name = "mqmeta",
    version,
    about = "Meta-evaluation of MT metrics against MQM annotations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)] // parsed once
enum Command {
    /// Per-segment and per-system MQM scores (All / Adequacy / Fluency / Other).
    Score,
    /// Pairwise accuracy and soft pairwise accuracy of metrics against All MQM.
    Metaeval,
    /// One-way ANOVA on adequacy and fluency, and the bias value B.
    Bias,
    /// Write score directories for synthesized system setups.
    Synthesize,
    /// Which aspect metrics follow on pairs where adequacy and fluency disagree.
    Breakdown,
    /// SPA against each aspect, with sentinel reference lines.
    SpaPlane,
    /// Metric response to one aspect with the other held fixed.
    Sensitivity,
    /// Write a seeded synthetic dataset directory.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// MQM annotation file (repeatable; one evaluation set each).
    #[arg(long, global = true)]
    mqm: Vec<String>,
    /// Score directory with adequacy.tsv / fluency.tsv (repeatable).
    #[arg(long, global = true)]
    data: Vec<String>,
    /// External metric scores: `name=path[:lower]` (repeatable).
    #[arg(long, global = true)]
    metric: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Permutation resamples.
    #[arg(long, global = true)]
    resamples: Option<String>,
    /// Severity weight file.
    #[arg(long, global = true)]
    weights: Option<String>,
    /// auto, default, en-es, or a taxonomy file.
    #[arg(long, global = true)]
    taxonomy: Option<String>,
    /// System setups, e.g. `original,synth-adequacy` (repeatable, or `;`-separated).
    #[arg(long, global = true)]
    systems: Vec<String>,
    #[arg(long, global = true)]
    out_dir: Option<String>,
    /// macro or micro.
    #[arg(long, global = true)]
    aggregate: Option<String>,
    /// Noise instances per knowledge line.
    #[arg(long, global = true)]
    instances: Option<String>,
    #[arg(long, global = true)]
    grid_step: Option<String>,
    /// global or segment-macro.
    #[arg(long, global = true)]
    weighting: Option<String>,
    /// Fail on incomplete segments instead of dropping them.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    num_systems: Option<String>,
    #[arg(long)]
    num_segments: Option<String>,
    #[arg(long)]
    adequacy_base: Option<String>,
    #[arg(long)]
    adequacy_spread: Option<String>,
    #[arg(long)]
    adequacy_sd: Option<String>,
    #[arg(long)]
    fluency_base: Option<String>,
    #[arg(long)]
    fluency_spread: Option<String>,
    #[arg(long)]
    fluency_sd: Option<String>,
    #[arg(long)]
    segment_sd: Option<String>,
    #[arg(long)]
    correlation: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
    #[arg(long)]
    metric_noise: Option<String>,
}

fn settings(cli: &Cli) -> Result<Settings> {
    let c = &cli.common;
    let mut s = match &c.config {
        Some(p) => read_config_file(p)?,
        None => Settings::default(),
    };
    let one = |v: &Option<String>| v.iter().cloned().collect::<Vec<_>>();
    for (key, values) in [
        ("mqm", c.mqm.clone()),
        ("data", c.data.clone()),
        ("metric", c.metric.clone()),
        ("systems", c.systems.clone()),
        ("seed", one(&c.seed)),
        ("resamples", one(&c.resamples)),
        ("weights", one(&c.weights)),
        ("taxonomy", one(&c.taxonomy)),
        ("out_dir", one(&c.out_dir)),
        ("aggregate", one(&c.aggregate)),
        ("instances", one(&c.instances)),
        ("grid_step", one(&c.grid_step)),
        ("weighting", one(&c.weighting)),
    ] {
        s.set(key, values);
    }
    if c.strict {
        s.set("strict", vec!["true".into()]);
    }
    if let Command::Generate(g) = &cli.command {
        for (key, v) in [
            ("num_systems", &g.num_systems),
            ("num_segments", &g.num_segments),
            ("adequacy_base", &g.adequacy_base),
            ("adequacy_spread", &g.adequacy_spread),
            ("adequacy_sd", &g.adequacy_sd),
            ("fluency_base", &g.fluency_base),
            ("fluency_spread", &g.fluency_spread),
            ("fluency_sd", &g.fluency_sd),
            ("segment_sd", &g.segment_sd),
            ("correlation", &g.correlation),
            ("lattice", &g.lattice),
            ("metric_noise", &g.metric_noise),
        ] {
            s.set(key, one(v));
        }
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let s = settings(cli)?;
    let cfg = RunConfig::from_settings(&s)?;
    match &cli.command {
        Command::Score => commands::cmd_score(&cfg),
        Command::Metaeval => commands::cmd_metaeval(&cfg),
        Command::Bias => commands::cmd_bias(&cfg),
        Command::Synthesize => commands::cmd_synthesize(&cfg),
        Command::Breakdown => commands::cmd_breakdown(&cfg),
        Command::SpaPlane => commands::cmd_spa_plane(&cfg),
        Command::Sensitivity => commands::cmd_sensitivity(&cfg),
        Command::Generate(_) => {
            commands::cmd_generate(&cfg, &SyntheticSpec::from_settings(&s, cfg.seed)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
