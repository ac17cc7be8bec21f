use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use medstack_harness::{fetch, load_datasets, report, run_experiment, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "medstack", version, about = "Cross-validated classifier and ensemble comparison on tabular medical data")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Restrict to these datasets (repeatable).
    #[arg(long = "dataset", global = true)]
    datasets: Vec<String>,

    /// Fail when a model's accuracy falls below the majority rate minus 0.03.
    #[arg(long, global = true)]
    strict: bool,

    /// Train stacking meta-learners on in-sample base predictions.
    #[arg(long, global = true)]
    stacking_naive: bool,

    /// Dataset cache directory [env: MEDSTACK_CACHE].
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Base URL to download missing datasets from [env: MEDSTACK_MIRROR].
    #[arg(long, global = true)]
    mirror: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Download or validate the dataset cache.
    Fetch,
    /// Run the cross-validation experiment and write reports.
    Run,
    /// Re-render report files from an existing report.json.
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if !cli.datasets.is_empty() {
        cfg.datasets = cli.datasets.clone();
    }
    cfg.strict |= cli.strict;
    cfg.ensembles.stacking.naive |= cli.stacking_naive;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let cache = cli.cache.clone().unwrap_or_else(fetch::default_cache_dir);
    let mirror = cli.mirror.clone().or_else(fetch::default_mirror);
    match cli.command {
        Command::Fetch => {
            for f in fetch::fetch_datasets(&cfg.datasets, &cache, mirror.as_deref())? {
                println!("{} {} ({:?})", f.name, f.path.display(), f.origin);
            }
        }
        Command::Run => {
            let datasets = load_datasets(&cfg.datasets, &cache, mirror.as_deref())?;
            let rep = run_experiment(&cfg, &datasets)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            for path in report::render_report(&rep, &cfg.output.dir, &cfg.output.formats, cfg.output.roc)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Report => {
            let rep = report::load_json(&cfg.output.dir.join("report.json"))?;
            let formats: Vec<String> = cfg.output.formats.iter().filter(|f| *f != "json").cloned().collect();
            for path in report::render_report(&rep, &cfg.output.dir, &formats, cfg.output.roc)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
