use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use randset_lab::report::{aggregate, rows_csv};
use randset_lab::{run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "randset", about = "Sampling and verification experiments on random closed sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in the config.
    Run(Common),
    /// Write raw samples.
    Sample(Common),
    /// Estimate and persist a cell-pattern law.
    Law(Common),
    /// Empty-set mass against its closed form.
    Atom(Common),
    /// Box-counting dimension.
    Dim(Common),
    /// Gap-size tail of a subordinator range.
    Gaptail(Common),
    /// Equivalence of two laws.
    Equiv(Common),
    /// Product of the two halves against the joint law.
    Split(Common),
    /// Singularity of two Bessel zero-set laws.
    Sing(Common),
    /// Invariance under rescaling.
    Scale(Common),
    /// Binomial/Poisson block check.
    Poisson(Common),
    /// Exact identity suite.
    Algebra(Common),
    /// Orientation statistic of jump sets.
    Asym(Common),
    /// Collect every report CSV in a directory into summary.csv.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn config(common: &Common, experiment: Option<&str>) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = experiment {
        cfg.set("experiment", e)?;
    }
    for kv in &common.set {
        cfg.apply_override(kv)?;
    }
    if let Some(s) = common.seed {
        cfg.set("seed", &s.to_string())?;
    }
    if let Some(o) = &common.out {
        cfg.set("out", &o.to_string_lossy())?;
    }
    if let Some(w) = common.workers {
        cfg.set("workers", &w.to_string())?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (common, experiment) = match &cli.command {
        Command::Report { out } => {
            let rows = aggregate(out)?;
            print!("{}", rows_csv(&rows));
            return Ok(rows.iter().all(|r| r.verdict != "fail"));
        }
        Command::Run(c) => (c, None),
        Command::Sample(c) => (c, Some("sample")),
        Command::Law(c) => (c, Some("law")),
        Command::Atom(c) => (c, Some("atom-mass")),
        Command::Dim(c) => (c, Some("dimension")),
        Command::Gaptail(c) => (c, Some("gap-tail")),
        Command::Equiv(c) => (c, Some("equiv")),
        Command::Split(c) => (c, Some("split")),
        Command::Sing(c) => (c, Some("sing")),
        Command::Scale(c) => (c, Some("scale")),
        Command::Poisson(c) => (c, Some("poisson")),
        Command::Algebra(c) => (c, Some("algebra")),
        Command::Asym(c) => (c, Some("asym")),
    };
    let cfg = config(common, experiment)?;
    let rows = run_experiment(&cfg)?;
    print!("{}", rows_csv(&rows));
    Ok(rows.iter().all(|r| r.verdict != "fail"))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
