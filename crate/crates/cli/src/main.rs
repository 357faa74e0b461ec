#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;
use kappa_lab::config::ExperimentConfig;
use kappa_lab::{run, run_suite, REGISTRY};

/// Numerical laboratory for the minimal representation of O(p+1,q+1).
///
/// `kappa-lab <experiment> [flags]` runs one experiment, `kappa-lab suite
/// primary-acceptance` runs the acceptance suite and `kappa-lab list` prints
/// the registry.
#[derive(Parser, Debug)]
#[command(name = "kappa-lab", version)]
struct Cli {
    /// Experiment id, `suite` or `list`.
    target: String,
    /// Suite name after `suite`.
    name: Option<String>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    k: Option<f64>,
    /// Deformation parameter, e.g. `3/2`.
    #[arg(long)]
    a: Option<String>,
    /// FFT points, Laguerre modes or sphere cutoff, per experiment.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Model cache; `KAPPA_LAB_CACHE` takes precedence.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            experiment: String::new(),
            p: self.p,
            q: self.q,
            k: self.k,
            a: self.a.clone(),
            grid: self.grid,
            radius: self.radius,
            tol: self.tol,
            seed: 0,
            jobs: self.jobs,
            cache_dir: self.cache_dir.clone(),
            out_dir: self.out_dir.clone(),
        };
        let mut cfg = base.merge(flags);
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    let mut cfg = cli.config()?;
    match cli.target.as_str() {
        "list" => {
            for e in REGISTRY {
                println!("{:<20} {}", e.id, e.summary);
            }
            Ok(true)
        }
        "suite" => {
            let Some(name) = cli.name.as_deref() else {
                bail!("`suite` needs a name, e.g. primary-acceptance")
            };
            let report = run_suite(name, &cfg)?;
            for line in report.summary_lines() {
                println!("{line}");
            }
            println!(
                "{} in {:.1}s",
                if report.pass { "PASS" } else { "FAIL" },
                report.wall_time_s
            );
            Ok(report.pass)
        }
        id => {
            if cli.name.is_some() {
                bail!("unexpected argument after experiment `{id}`");
            }
            cfg.experiment = id.to_string();
            let record = run(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&record)?);
            Ok(record.pass)
        }
    }
}
